#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace mga
{

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kAstronomicalUnitKm = 1.495978707e8;
inline constexpr double kDaysPerJulianCentury = 36525.0;

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-physical catalog / problem input.
class ValidationError : public Error
{
public:
    explicit ValidationError(const std::string &what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }

    /// 1-based source line, 0 when unknown.
    int line() const noexcept { return line_; }

private:
    int line_{0};
};

class KeplerError : public Error
{
public:
    using Error::Error;
};

class LambertError : public Error
{
public:
    using Error::Error;
};

class FlybyError : public Error
{
public:
    using Error::Error;
};

}  // namespace mga
