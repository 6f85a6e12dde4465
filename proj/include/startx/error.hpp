#pragma once

#include <stdexcept>
#include <string>

namespace startx {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which family of singular directions an evaluation ran into.
enum class SingularSet { type1, type2 };

inline const char* to_string(SingularSet s) {
    return s == SingularSet::type1 ? "type1" : "type2";
}

/// Raised when w or q is evaluated at (or within zero_floor of) a singular direction.
class SingularValueError : public Error {
public:
    SingularValueError(SingularSet set, double angle, const std::string& what)
        : Error(what), set_(set), angle_(angle) {}

    SingularSet set() const noexcept { return set_; }
    /// Polar angle of the offending direction, radians.
    double angle() const noexcept { return angle_; }

private:
    SingularSet set_;
    double angle_;
};

}  // namespace startx
