#ifndef RIS_TOUCHSTONE_HPP
#define RIS_TOUCHSTONE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ris/common.hpp"

namespace ris {

/// One frequency point of an n-port scattering matrix.
struct NetworkPoint {
  double frequency_hz = 0.0;
  Eigen::MatrixXcd s;
};

/// An n-port S-parameter sweep (the Touchstone payload).
///
/// The reference impedance is carried through parsing and serialization but
/// no routine in this library renormalizes between impedances: every
/// reflection coefficient is taken at the same reference.
struct PortNetwork {
  int n_ports = 1;
  double reference_impedance = 50.0;
  std::vector<NetworkPoint> points;

  std::size_t size() const { return points.size(); }
  double min_frequency() const { return points.front().frequency_hz; }
  double max_frequency() const { return points.back().frequency_hz; }

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
};

/// Per-state complex reflection coefficient over frequency.
///
/// gamma(row, col) holds state states[row] at frequencies[col]. State labels
/// are sorted ascending; their count is a power of two.
struct ReflectionProfile {
  std::vector<int> states;
  Eigen::VectorXd frequencies;
  Eigen::MatrixXcd gamma;

  Eigen::Index state_count() const { return static_cast<Eigen::Index>(states.size()); }
  Eigen::Index frequency_count() const { return frequencies.size(); }

  /// Row index of a state label, or -1.
  Eigen::Index row_of(int state) const;

  void validate() const;
};

enum class TouchstoneFormat { RI, MA, DB };
enum class FrequencyUnit { Hz, kHz, MHz, GHz };

double unit_scale(FrequencyUnit unit);
std::string_view to_string(TouchstoneFormat format);
std::string_view to_string(FrequencyUnit unit);
TouchstoneFormat parse_format(std::string_view token);
FrequencyUnit parse_frequency_unit(std::string_view token);

/// Parses Touchstone v1 text. The port count is taken from `n_ports` when
/// given (e.g. from the file extension), otherwise inferred from the number
/// of values on the first data record (3 -> 1-port, 9 -> 2-port).
/// Throws ParseError carrying the offending line number.
PortNetwork parse_touchstone(std::string_view text, std::optional<int> n_ports = std::nullopt);

std::string serialize_touchstone(const PortNetwork& net, TouchstoneFormat format = TouchstoneFormat::RI,
                                 FrequencyUnit unit = FrequencyUnit::GHz);

/// Reads `freq_hz,state,mag_db,phase_deg` rows into a complete state grid.
ReflectionProfile load_state_csv(std::string_view text);

/// Writes a profile with the same header load_state_csv reads, rows ordered
/// by frequency then state.
std::string write_state_csv(const ReflectionProfile& profile);

/// Port count from a `.sNp` file name, if the extension has that form.
std::optional<int> touchstone_ports_from_path(std::string_view path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace ris

#endif  // RIS_TOUCHSTONE_HPP
