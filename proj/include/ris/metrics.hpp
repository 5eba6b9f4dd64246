#ifndef RIS_METRICS_HPP
#define RIS_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ris/common.hpp"
#include "ris/touchstone.hpp"

namespace ris {

/// Gaps between neighbouring phases on the unit circle, wrap-around gap
/// included. Phases are reduced to [0, 360) and sorted first, so the result
/// ignores input order and any common offset. The gaps sum to 360.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> circular_gaps(const Eigen::DenseBase<Derived>& phases_deg) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = phases_deg.size();
  if (n < 2) throw std::invalid_argument("circular_gaps: at least 2 phases required");
  std::vector<Scalar> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar v = phases_deg.derived().coeff(i);
    if (!std::isfinite(v)) throw std::invalid_argument("circular_gaps: non-finite phase");
    p[static_cast<std::size_t>(i)] = wrap_360(v);
  }
  std::sort(p.begin(), p.end());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gaps(n);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) gaps[static_cast<Eigen::Index>(i)] = p[i + 1] - p[i];
  gaps[n - 1] = Scalar(360) - (p.back() - p.front());
  return gaps;
}

/// sqrt( sum gap^3 / (12 * 360) ), degrees.
template <typename Derived>
typename Derived::Scalar sigma_phase(const Eigen::DenseBase<Derived>& gaps_deg) {
  using Scalar = typename Derived::Scalar;
  return std::sqrt(gaps_deg.derived().array().cube().sum() / (Scalar(12) * Scalar(360)));
}

/// log2( 360 / (sqrt(12) sigma) ).
template <typename Scalar>
Scalar effective_bits(Scalar sigma_deg) {
  if (!(sigma_deg > Scalar(0))) throw std::invalid_argument("effective_bits: sigma must be > 0");
  return std::log2(Scalar(360) / (std::sqrt(Scalar(12)) * sigma_deg));
}

/// Largest admissible sigma for a 1-, 2- or 3-bit surface.
double sigma_threshold(int resolution_bits);

struct BandwidthReport {
  int resolution_bits = 0;
  double f_center_hz = 0.0;
  Eigen::VectorXd frequencies;
  Eigen::VectorXd sigma_deg;
  Eigen::VectorXd n_bit_eff;
  Eigen::VectorXd min_magnitude_db;  // worst state per frequency, not used by the band
  double threshold_deg = 0.0;
  std::optional<std::pair<double, double>> band;
  double bandwidth_hz = 0.0;
};

/// sigma of the state phases in each column of the profile.
Eigen::VectorXd sigma_over_frequency(const ReflectionProfile& profile);

/// Largest contiguous interval around f_center where sigma stays within the
/// threshold for `resolution_bits`. Edges are interpolated linearly in
/// sigma between grid points.
BandwidthReport bandwidth(const ReflectionProfile& profile, int resolution_bits, double f_center_hz);

/// Sub-profile with only the listed states (labels are kept).
ReflectionProfile select_states(const ReflectionProfile& profile, std::span<const int> indices);

std::string report_to_json(const BandwidthReport& report, bool include_literature = true);
std::string report_to_csv(const BandwidthReport& report);

/// Published bandwidths of other surfaces, echoed for comparison.
struct LiteratureEntry {
  const char* reference;
  double f_center_ghz;
  int resolution_bits;
  double bandwidth_mhz;
};
std::span<const LiteratureEntry> literature_bandwidths();

}  // namespace ris

#endif  // RIS_METRICS_HPP
