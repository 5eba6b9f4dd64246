#ifndef RIS_GATING_HPP
#define RIS_GATING_HPP

#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ris/common.hpp"
#include "ris/touchstone.hpp"

namespace ris {

/// Complex response on a frequency grid. time_gate additionally needs a
/// uniform grid (1e-6 relative) of at least 8 points.
struct Sweep {
  Eigen::VectorXd frequencies;
  Eigen::VectorXcd values;

  Eigen::Index size() const { return frequencies.size(); }
};

struct GateSpec {
  double t_start_s = 0.0;
  double t_stop_s = 0.0;
  double edge_fraction = 0.25;  // Tukey taper, shared by both edges
  double kaiser_beta = 6.0;     // pre-window across the band
  int zero_padding = 4;
};

struct PathComponent {
  double delay_s;
  Complex amplitude;
};

inline constexpr double kWindowFloor = 1e-3;

/// sum_k a_k exp(-j 2 pi f tau_k) on the given grid.
Sweep synth_multipath(std::span<const PathComponent> paths, const Eigen::Ref<const Eigen::VectorXd>& frequencies);

Eigen::VectorXd kaiser_window(Eigen::Index n, double beta);

/// Tukey gate over [t_start, t_stop] evaluated at `times`; zero outside.
Eigen::VectorXd tukey_gate(const Eigen::Ref<const Eigen::VectorXd>& times, double t_start, double t_stop,
                           double edge_fraction);

/// Alias-free time span 1 / df of a uniform sweep.
double alias_free_span(const Sweep& sweep);

/// Windowed inverse transform to time, gate, forward transform, and
/// window compensation. Output shares the input grid.
Sweep time_gate(const Sweep& sweep, const GateSpec& gate);

/// Samples within the outer 10% of the band at either edge, where window
/// compensation is ill-conditioned.
Eigen::Array<bool, Eigen::Dynamic, 1> low_confidence_mask(const Sweep& sweep);

/// dut / reference * (-1): the plate is taken as a perfect reflector.
Sweep normalize_to_plate(const Sweep& dut, const Sweep& reference);

/// CSV with header freq_hz,re,im; `#` lines are comments.
Sweep load_sweep_csv(std::string_view text);
std::string write_sweep_csv(const Sweep& sweep, std::string_view comment = {});

Sweep sweep_from_network(const PortNetwork& net);
PortNetwork sweep_to_network(const Sweep& sweep, double reference_impedance = 50.0);

}  // namespace ris

#endif  // RIS_GATING_HPP
