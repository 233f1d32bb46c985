#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnss {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Interpolation nodes are not pairwise distinct.
struct DegenerateNodes : Error {
    using Error::Error;
};

// recon() was given fewer than t+1 shares.
struct InsufficientShares : Error {
    using Error::Error;
};

// Operands live on different evaluation domains or hold different point sets.
struct DomainMismatch : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A Beaver triple was consumed twice.
struct TripleReused : Error {
    using Error::Error;
};

// The opened masked product is numerically unusable (|sr| below epsilon, or
// the opened matrix fails the conditioning check). Retry with fresh randomness.
struct SingularMask : Error {
    using Error::Error;
};

struct SingularInnovation : Error {
    using Error::Error;
};

// A party failed to contribute to a round.
struct ProtocolAbort : Error {
    ProtocolAbort(std::string what, std::uint32_t round_, std::vector<int> missing_)
        : Error(std::move(what)), round(round_), missing(std::move(missing_)) {}
    explicit ProtocolAbort(std::string what) : Error(std::move(what)) {}

    std::uint32_t round = 0;
    std::vector<int> missing;
};

struct ConfigError : Error {
    using Error::Error;
};

// Peers disagree on the experiment configuration hash.
struct ConfigMismatch : Error {
    using Error::Error;
};

}  // namespace rnss
