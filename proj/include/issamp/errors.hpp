#pragma once

#include <stdexcept>
#include <string>

namespace issamp {

// Base class for all toolkit errors. Solver outcomes (infeasible, unbounded,
// iteration limit) are reported in-band via SolveStatus and never thrown.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaError : Error {
    using Error::Error;
};
struct GapError : Error {
    using Error::Error;
};
struct RangeError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct EmptySelection : Error {
    using Error::Error;
};
struct BadK : Error {
    using Error::Error;
};
struct EmptySample : Error {
    using Error::Error;
};
struct NotOptimal : Error {
    using Error::Error;
};
struct IntegrityError : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct BadCount : Error {
    using Error::Error;
};
struct ClusterError : Error {
    using Error::Error;
};
struct ZeroCost : Error {
    using Error::Error;
};
struct UsageError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace issamp
