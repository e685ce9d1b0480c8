#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace netdetect {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument: shape mismatch, out-of-range parameter, malformed input.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A precondition on the network or model that an analysis requires does not hold
/// (non-reversible chain, unbounded log-likelihood ratio, periodic chain, ...).
class AssumptionViolated : public Error {
public:
    using Error::Error;
};

/// The consensus chain is reducible. Carries the strongly connected components in
/// the order returned by scc_decomposition().
class ReducibleChainError : public AssumptionViolated {
public:
    ReducibleChainError(const std::string& what, std::vector<std::vector<std::size_t>> components)
        : AssumptionViolated(what), components_(std::move(components)) {}

    const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

private:
    std::vector<std::vector<std::size_t>> components_;
};

}  // namespace netdetect
