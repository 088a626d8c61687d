#pragma once

#include <stdexcept>
#include <string>

namespace rofu {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A symmetric factorization hit a non-positive pivot: the matrix is not PSD.
struct NotPsdError : Error {
    using Error::Error;
};

// Sherman-Morrison denominator 1 + u'Z^-1 u collapsed below tolerance.
struct DegenerateUpdateError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct EmptyDatasetError : Error {
    using Error::Error;
};

// A loss or UCB objective became non-finite (usually a divergent step size).
struct NonFiniteError : Error {
    using Error::Error;
};

// UCB1 needs at least one pull per arm before it is defined.
struct UnpulledArmError : Error {
    using Error::Error;
};

// A dataset-backed environment ran out of rows.
struct ExhaustedError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct LabelOutOfRangeError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Aggregation over runs whose env/agent fingerprints or horizons disagree.
struct FingerprintError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace rofu
