#ifndef RIS_COMMON_HPP
#define RIS_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ris {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Reduces an angle in degrees to [0, 360).
template <typename Scalar>
Scalar wrap_360(Scalar deg) {
  Scalar r = std::fmod(deg, Scalar(360));
  if (r < Scalar(0)) r += Scalar(360);
  if (r >= Scalar(360)) r = Scalar(0);
  return r;
}

/// Signed circular difference a - b in degrees, reduced to (-180, 180].
template <typename Scalar>
Scalar circular_diff(Scalar a, Scalar b) {
  Scalar d = wrap_360(a - b);
  return d > Scalar(180) ? d - Scalar(360) : d;
}

template <typename Scalar>
Scalar circular_distance(Scalar a, Scalar b) {
  return std::abs(circular_diff(a, b));
}

template <typename Scalar>
Scalar phase_deg(const std::complex<Scalar>& z) {
  return rad_to_deg(std::arg(z));
}

inline Complex polar_deg(double magnitude, double angle_deg) {
  return std::polar(magnitude, deg_to_rad(angle_deg));
}

// Error hierarchy. Precondition violations on arguments use
// std::invalid_argument; everything below is data- or numerics-driven.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A frequency or time value outside the domain covered by the data.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Vanishing denominator in a reflection cascade or normalization.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ris

#endif  // RIS_COMMON_HPP
