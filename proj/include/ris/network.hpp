#ifndef RIS_NETWORK_HPP
#define RIS_NETWORK_HPP

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "ris/common.hpp"
#include "ris/touchstone.hpp"

namespace ris {

/// Two-port S-parameters at one frequency. Port 1 is the free-space
/// (Floquet) side of the unit cell, port 2 the microstrip feed.
template <typename Scalar>
struct TwoPortPoint {
  using ComplexT = std::complex<Scalar>;

  Scalar frequency_hz = Scalar(0);
  ComplexT s11{0}, s12{0}, s21{0}, s22{0};

  static TwoPortPoint ideal_thru(Scalar frequency_hz = Scalar(0)) {
    return {frequency_hz, ComplexT(0), ComplexT(1), ComplexT(1), ComplexT(0)};
  }

  template <typename Derived>
  static TwoPortPoint from_matrix(Scalar frequency_hz, const Eigen::MatrixBase<Derived>& s) {
    eigen_assert(s.rows() == 2 && s.cols() == 2);
    return {frequency_hz, s(0, 0), s(0, 1), s(1, 0), s(1, 1)};
  }

  Eigen::Matrix<ComplexT, 2, 2> matrix() const {
    Eigen::Matrix<ComplexT, 2, 2> m;
    m << s11, s12, s21, s22;
    return m;
  }
};

using TwoPort = TwoPortPoint<double>;

inline constexpr double kCascadeSingularityTolerance = 1e-12;

/// Surface reflection seen at port 1 when port 2 is terminated by
/// `gamma_load`:  s11 + s21 s12 gamma_load / (1 - s22 gamma_load).
/// Throws SingularityError when |1 - s22 gamma_load| <= 1e-12.
template <typename Scalar>
std::complex<Scalar> cascade_reflection(const TwoPortPoint<Scalar>& p, const std::complex<Scalar>& gamma_load) {
  const std::complex<Scalar> denom = Scalar(1) - p.s22 * gamma_load;
  if (!(std::abs(denom) > Scalar(kCascadeSingularityTolerance))) {
    throw SingularityError("cascade_reflection: |1 - s22*gamma_load| = " + std::to_string(std::abs(denom)) +
                           " is singular");
  }
  return p.s11 + (p.s21 * p.s12 * gamma_load) / denom;
}

/// Linear interpolation of every S-matrix entry (real and imaginary parts
/// independently). Exact at grid points; throws RangeError outside the sweep.
Eigen::MatrixXcd interpolate_at(const PortNetwork& net, double frequency_hz);

/// interpolate_at for a 2-port network, returned as a TwoPort.
TwoPort two_port_at(const PortNetwork& net, double frequency_hz);

/// Per-state reflection coefficients at one frequency, interpolated
/// linearly over the profile grid.
Eigen::VectorXcd profile_at(const ReflectionProfile& profile, double frequency_hz);

/// Cascades every load state through the unit-cell two-port on the loads'
/// own frequency grid. Errors are annotated with (state, frequency).
ReflectionProfile profile_from_network(const PortNetwork& unit_cell, const ReflectionProfile& loads);

/// Largest singular value of each S-matrix, maximized over the sweep.
double max_singular_value(const PortNetwork& net);

}  // namespace ris

#endif  // RIS_NETWORK_HPP
