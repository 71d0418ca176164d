#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace optomech {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical parameter violates its domain (negative mass, NaN power, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// The drift matrix has an eigenvalue with non-negative real part, so the
/// fluctuations never settle into a stationary state.
class NoStationaryState : public Error {
public:
    using Error::Error;
};

/// The discriminant cubic of the critical-point problem has more than one real
/// root; the single-threshold picture does not apply.
class MultiCriticalError : public Error {
public:
    MultiCriticalError(const std::string& what, std::vector<double> roots)
        : Error(what), roots_(std::move(roots)) {}

    /// Real roots (in beta_s^2) of the discriminant cubic.
    [[nodiscard]] const std::vector<double>& roots() const noexcept { return roots_; }

private:
    std::vector<double> roots_;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

}  // namespace optomech
