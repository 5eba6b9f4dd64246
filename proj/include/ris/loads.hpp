#ifndef RIS_LOADS_HPP
#define RIS_LOADS_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ris/common.hpp"
#include "ris/network.hpp"
#include "ris/touchstone.hpp"

namespace ris {

/// Microstrip line with a quasi-static permittivity model and a scalar
/// attenuation that scales with sqrt(f).
struct MicrostripLine {
  double width_m = 1.5e-3;
  double substrate_height_m = 0.8e-3;
  double epsilon_r = 4.9;
  double loss_db_per_m = 0.0;  // at reference_frequency_hz
  double reference_frequency_hz = 3.6e9;

  void validate() const;
  double attenuation_db_per_m(double frequency_hz) const;
};

enum class Termination { Open, Short };

std::string_view to_string(Termination t);
Termination parse_termination(std::string_view s);

/// Signal path through one switch throw. No network means an ideal thru.
class SwitchModel {
 public:
  SwitchModel() = default;
  explicit SwitchModel(PortNetwork path);

  static SwitchModel ideal() { return {}; }

  bool is_ideal() const { return !path_.has_value(); }
  const std::optional<PortNetwork>& network() const { return path_; }

  /// Throw path at `frequency_hz`; RangeError outside the switch sweep.
  TwoPort at(double frequency_hz) const;

  /// Label carried into design documents ("ideal" or a file path).
  std::string source = "ideal";

 private:
  std::optional<PortNetwork> path_;
};

struct StubState {
  int state = 0;
  double length_m = 0.0;
  Termination termination = Termination::Open;
  double residual_deg = 0.0;
};

struct StubNetworkDesign {
  std::vector<StubState> states;
  MicrostripLine line;
  SwitchModel switch_model;
  double f_center_hz = 3.6e9;

  /// 2^n entries, non-negative lengths, and an even open/short split for
  /// the 8-state network.
  void validate() const;
};

/// Hammerstad-Jensen effective permittivity (no dispersion).
double microstrip_eeff(const MicrostripLine& line);

/// Guided wavelength c / (f sqrt(eps_eff)).
double guided_wavelength(const MicrostripLine& line, double frequency_hz);

/// Reflection at the input of a terminated stub of `length_m`:
/// open -> exp(-j 2 beta l), short -> -exp(-j 2 beta l), scaled by the
/// round-trip line attenuation.
Complex stub_reflection(double length_m, Termination termination, double frequency_hz, const MicrostripLine& line);

/// SPDT with one throw open and the other grounded: state 0 sees +1 and
/// state 1 sees -1 through the switch path.
ReflectionProfile spdt_load_profile(const SwitchModel& sw, std::span<const double> frequencies);

ReflectionProfile sp8t_load_profile(const StubNetworkDesign& design, std::span<const double> frequencies);

struct FrequencyBand {
  double low_hz;
  double high_hz;
};

struct SynthesisOptions {
  int state_count = 8;
  int band_points = 21;       // used when no weights are supplied
  int coarse_samples = 64;    // bracketing scan before golden-section refinement
  int max_iterations = 200;
  double relative_tolerance = 1e-11;  // of the guided wavelength
};

/// Chooses terminations and stub lengths so that state i reflects with
/// phase i*360/N degrees across `band`. `weights` (one per band sample,
/// uniformly spaced over the band) default to uniform.
StubNetworkDesign synthesize_stub_lengths(const SwitchModel& sw, const MicrostripLine& line, double f_center_hz,
                                          FrequencyBand band, std::span<const double> weights = {},
                                          const SynthesisOptions& options = {});

std::string design_to_json(const StubNetworkDesign& design);

/// Parses a design document. A non-ideal switch source is resolved through
/// `load_switch`, which receives the stored path.
StubNetworkDesign design_from_json(std::string_view text,
                                   const std::function<PortNetwork(const std::string&)>& load_switch = {});

}  // namespace ris

#endif  // RIS_LOADS_HPP
