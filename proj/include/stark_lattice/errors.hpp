#pragma once

#include <stdexcept>
#include <string>

namespace stark {

/// Bad input parameters (caught by the CLI and mapped to exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its own quality gate.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Nearest-energy band tracking hit a near-crossing; refine the kappa grid.
class TrackingAmbiguity : public NumericalError {
public:
    TrackingAmbiguity(const std::string& what, std::size_t index, double kappa)
        : NumericalError(what), index_(index), kappa_(kappa) {}

    std::size_t index() const noexcept { return index_; }
    double kappa() const noexcept { return kappa_; }

private:
    std::size_t index_;
    double kappa_;
};

/// Band width did not stabilise under truncation doubling.
class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, double previous, double last, int site_range)
        : NumericalError(what), previous_(previous), last_(last), site_range_(site_range) {}

    double previous() const noexcept { return previous_; }
    double last() const noexcept { return last_; }
    int site_range() const noexcept { return site_range_; }

private:
    double previous_;
    double last_;
    int site_range_;
};

} // namespace stark
