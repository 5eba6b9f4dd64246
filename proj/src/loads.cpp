#include "ris/loads.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ris/golden_section.hpp"

namespace ris {

void MicrostripLine::validate() const {
  if (!(width_m > 0.0) || !(substrate_height_m > 0.0)) {
    throw std::invalid_argument("MicrostripLine: width and substrate height must be > 0");
  }
  if (!(epsilon_r >= 1.0)) throw std::invalid_argument("MicrostripLine: epsilon_r must be >= 1");
  if (!(loss_db_per_m >= 0.0)) throw std::invalid_argument("MicrostripLine: loss must be >= 0");
  if (!(reference_frequency_hz > 0.0)) throw std::invalid_argument("MicrostripLine: reference frequency must be > 0");
}

double MicrostripLine::attenuation_db_per_m(double frequency_hz) const {
  return loss_db_per_m * std::sqrt(frequency_hz / reference_frequency_hz);
}

std::string_view to_string(Termination t) { return t == Termination::Open ? "open" : "short"; }

Termination parse_termination(std::string_view s) {
  if (s == "open") return Termination::Open;
  if (s == "short") return Termination::Short;
  throw std::invalid_argument("unknown termination '" + std::string(s) + "'");
}

SwitchModel::SwitchModel(PortNetwork path) : path_(std::move(path)) {
  path_->validate();
  if (path_->n_ports != 2) throw std::invalid_argument("SwitchModel: throw path must be a 2-port network");
}

TwoPort SwitchModel::at(double frequency_hz) const {
  return path_ ? two_port_at(*path_, frequency_hz) : TwoPort::ideal_thru(frequency_hz);
}

void StubNetworkDesign::validate() const {
  const auto n = states.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("StubNetworkDesign: state count must be 2^n");
  std::size_t open = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (states[i].state != static_cast<int>(i)) {
      throw std::invalid_argument("StubNetworkDesign: states must be listed as 0..N-1");
    }
    if (!(states[i].length_m >= 0.0)) throw std::invalid_argument("StubNetworkDesign: negative stub length");
    if (states[i].termination == Termination::Open) ++open;
  }
  if (n == 8 && open != 4) {
    throw std::invalid_argument("StubNetworkDesign: 8-state network needs 4 open and 4 short stubs, got " +
                                std::to_string(open) + " open");
  }
  line.validate();
}

double microstrip_eeff(const MicrostripLine& line) {
  line.validate();
  const double u = line.width_m / line.substrate_height_m;
  const double er = line.epsilon_r;
  const double u4 = u * u * u * u;
  const double a = 1.0 + std::log((u4 + (u / 52.0) * (u / 52.0)) / (u4 + 0.432)) / 49.0 +
                   std::log(1.0 + std::pow(u / 18.1, 3)) / 18.7;
  const double b = 0.564 * std::pow((er - 0.9) / (er + 3.0), 0.053);
  return (er + 1.0) / 2.0 + (er - 1.0) / 2.0 * std::pow(1.0 + 10.0 / u, -a * b);
}

double guided_wavelength(const MicrostripLine& line, double frequency_hz) {
  return kSpeedOfLight / (frequency_hz * std::sqrt(microstrip_eeff(line)));
}

namespace {

Complex stub_reflection_eeff(double length_m, Termination termination, double frequency_hz,
                             const MicrostripLine& line, double eeff) {
  const double beta = 2.0 * std::numbers::pi * frequency_hz * std::sqrt(eeff) / kSpeedOfLight;
  const double magnitude = std::pow(10.0, -2.0 * line.attenuation_db_per_m(frequency_hz) * length_m / 20.0);
  const Complex g = std::polar(magnitude, -2.0 * beta * length_m);
  return termination == Termination::Open ? g : -g;
}

void check_frequencies(std::span<const double> frequencies, const char* who) {
  if (frequencies.empty()) throw std::invalid_argument(std::string(who) + ": empty frequency list");
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    if (!(frequencies[k] > 0.0)) throw std::invalid_argument(std::string(who) + ": frequencies must be > 0");
    if (k > 0 && !(frequencies[k] > frequencies[k - 1])) {
      throw std::invalid_argument(std::string(who) + ": frequencies must be strictly increasing");
    }
  }
}

Eigen::VectorXd to_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Complex stub_reflection(double length_m, Termination termination, double frequency_hz, const MicrostripLine& line) {
  if (!(length_m >= 0.0)) throw std::invalid_argument("stub_reflection: length must be >= 0");
  if (!(frequency_hz > 0.0)) throw std::invalid_argument("stub_reflection: frequency must be > 0");
  return stub_reflection_eeff(length_m, termination, frequency_hz, line, microstrip_eeff(line));
}

ReflectionProfile spdt_load_profile(const SwitchModel& sw, std::span<const double> frequencies) {
  check_frequencies(frequencies, "spdt_load_profile");
  ReflectionProfile profile;
  profile.states = {0, 1};
  profile.frequencies = to_vector(frequencies);
  profile.gamma.resize(2, profile.frequencies.size());
  for (Eigen::Index c = 0; c < profile.frequencies.size(); ++c) {
    const TwoPort path = sw.at(profile.frequencies[c]);
    profile.gamma(0, c) = cascade_reflection(path, Complex(1.0));
    profile.gamma(1, c) = cascade_reflection(path, Complex(-1.0));
  }
  return profile;
}

ReflectionProfile sp8t_load_profile(const StubNetworkDesign& design, std::span<const double> frequencies) {
  design.validate();
  check_frequencies(frequencies, "sp8t_load_profile");
  const double eeff = microstrip_eeff(design.line);
  const auto n = static_cast<Eigen::Index>(design.states.size());

  ReflectionProfile profile;
  profile.states.resize(design.states.size());
  for (std::size_t i = 0; i < design.states.size(); ++i) profile.states[i] = static_cast<int>(i);
  profile.frequencies = to_vector(frequencies);
  profile.gamma.resize(n, profile.frequencies.size());
  for (Eigen::Index c = 0; c < profile.frequencies.size(); ++c) {
    const double f = profile.frequencies[c];
    const TwoPort path = design.switch_model.at(f);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& st = design.states[static_cast<std::size_t>(r)];
      profile.gamma(r, c) =
          cascade_reflection(path, stub_reflection_eeff(st.length_m, st.termination, f, design.line, eeff));
    }
  }
  return profile;
}

StubNetworkDesign synthesize_stub_lengths(const SwitchModel& sw, const MicrostripLine& line, double f_center_hz,
                                          FrequencyBand band, std::span<const double> weights,
                                          const SynthesisOptions& options) {
  line.validate();
  const int n_states = options.state_count;
  if (n_states < 2 || (n_states & (n_states - 1)) != 0) {
    throw std::invalid_argument("synthesize_stub_lengths: state count must be a power of two >= 2");
  }
  if (!(band.low_hz > 0.0) || band.low_hz > band.high_hz || f_center_hz < band.low_hz || f_center_hz > band.high_hz) {
    throw std::invalid_argument("synthesize_stub_lengths: band must contain the center frequency");
  }
  if (const auto& net = sw.network(); net && (band.low_hz < net->min_frequency() || band.high_hz > net->max_frequency())) {
    throw RangeError("synthesize_stub_lengths: band [" + format_double(band.low_hz) + ", " +
                     format_double(band.high_hz) + "] Hz outside switch sweep [" +
                     format_double(net->min_frequency()) + ", " + format_double(net->max_frequency()) + "] Hz");
  }

  std::size_t n_samples = !weights.empty() ? weights.size()
                          : band.low_hz == band.high_hz ? 1
                                                        : static_cast<std::size_t>(std::max(options.band_points, 2));
  if (band.low_hz == band.high_hz && n_samples != 1) {
    throw std::invalid_argument("synthesize_stub_lengths: single-frequency band takes one weight");
  }
  std::vector<double> w(n_samples, 1.0);
  if (!weights.empty()) {
    double total = 0.0;
    for (double x : weights) {
      if (!(x >= 0.0)) throw std::invalid_argument("synthesize_stub_lengths: weights must be >= 0");
      total += x;
    }
    if (!(total > 0.0)) throw std::invalid_argument("synthesize_stub_lengths: weights sum to zero");
    w.assign(weights.begin(), weights.end());
  }
  std::vector<double> freqs(n_samples);
  std::vector<TwoPort> paths(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    freqs[k] = n_samples == 1 ? f_center_hz
                              : band.low_hz + (band.high_hz - band.low_hz) * static_cast<double>(k) /
                                                  static_cast<double>(n_samples - 1);
    paths[k] = sw.at(freqs[k]);
  }
  const TwoPort center_path = sw.at(f_center_hz);

  const double eeff = microstrip_eeff(line);
  const double lambda_g = guided_wavelength(line, f_center_hz);
  const double w_total = [&] {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  }();

  StubNetworkDesign design;
  design.line = line;
  design.switch_model = sw;
  design.f_center_hz = f_center_hz;

  for (int i = 0; i < n_states; ++i) {
    const double target = 360.0 * i / n_states;

    // Lossless ideal-thru electrical length (deg) for each termination.
    const double open_len_deg = wrap_360(-target) / 2.0;
    const double short_len_deg = wrap_360(180.0 - target) / 2.0;
    const Termination term = open_len_deg <= short_len_deg ? Termination::Open : Termination::Short;

    auto objective = [&](double length) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n_samples; ++k) {
        if (w[k] == 0.0) continue;
        const Complex g = cascade_reflection(paths[k], stub_reflection_eeff(length, term, freqs[k], line, eeff));
        const double e = circular_diff(phase_deg(g), target);
        acc += w[k] * e * e;
      }
      return acc / w_total;
    };

    // Coarse scan of [0, lambda_g/2) brackets the global minimum; the error
    // is periodic in length so the raw interval is not unimodal.
    const int m = std::max(options.coarse_samples, 4);
    const double span = lambda_g / 2.0;
    const double step = span / m;
    int best = 0;
    double best_val = objective(0.0);
    for (int j = 1; j < m; ++j) {
      const double v = objective(j * step);
      if (v < best_val) {
        best_val = v;
        best = j;
      }
    }
    const double lo = best == 0 ? 0.0 : (best - 1) * step;
    const double hi = (best + 1) * step;
    auto refined = golden_section_minimize(objective, lo, hi, options.relative_tolerance * lambda_g,
                                           options.max_iterations);

    double length = refined.x;
    if (best == 0 && objective(0.0) <= refined.value) length = 0.0;

    StubState st;
    st.state = i;
    st.termination = term;
    st.length_m = length;
    const Complex g_center =
        cascade_reflection(center_path, stub_reflection_eeff(length, term, f_center_hz, line, eeff));
    st.residual_deg = circular_distance(phase_deg(g_center), target);
    design.states.push_back(st);
  }
  design.validate();
  return design;
}

std::string design_to_json(const StubNetworkDesign& design) {
  using nlohmann::ordered_json;
  const double lambda_g = guided_wavelength(design.line, design.f_center_hz);
  ordered_json doc;
  doc["f_center_hz"] = design.f_center_hz;
  doc["switch"] = design.switch_model.source;
  doc["line"] = {{"width_m", design.line.width_m},
                 {"substrate_height_m", design.line.substrate_height_m},
                 {"epsilon_r", design.line.epsilon_r},
                 {"loss_db_per_m", design.line.loss_db_per_m},
                 {"reference_frequency_hz", design.line.reference_frequency_hz}};
  doc["guided_wavelength_m"] = lambda_g;
  ordered_json states = ordered_json::array();
  for (const auto& st : design.states) {
    states.push_back({{"state", st.state},
                      {"termination", std::string(to_string(st.termination))},
                      {"length_m", st.length_m},
                      {"electrical_length_deg", 360.0 * st.length_m / lambda_g},
                      {"residual_deg", st.residual_deg}});
  }
  doc["states"] = std::move(states);
  return doc.dump(2) + "\n";
}

StubNetworkDesign design_from_json(std::string_view text,
                                   const std::function<PortNetwork(const std::string&)>& load_switch) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("design JSON: ") + e.what());
  }
  try {
    StubNetworkDesign design;
    design.f_center_hz = doc.value("f_center_hz", 3.6e9);
    const auto& line = doc.at("line");
    design.line.width_m = line.at("width_m").get<double>();
    design.line.substrate_height_m = line.at("substrate_height_m").get<double>();
    design.line.epsilon_r = line.at("epsilon_r").get<double>();
    design.line.loss_db_per_m = line.value("loss_db_per_m", 0.0);
    design.line.reference_frequency_hz = line.value("reference_frequency_hz", design.f_center_hz);
    const std::string source = doc.value("switch", std::string("ideal"));
    if (source != "ideal") {
      if (!load_switch) throw ParseError(0, "design JSON: switch '" + source + "' needs a loader");
      design.switch_model = SwitchModel(load_switch(source));
    }
    design.switch_model.source = source;
    for (const auto& st : doc.at("states")) {
      StubState s;
      s.state = st.at("state").get<int>();
      s.termination = parse_termination(st.at("termination").get<std::string>());
      s.length_m = st.at("length_m").get<double>();
      s.residual_deg = st.value("residual_deg", 0.0);
      design.states.push_back(s);
    }
    design.validate();
    return design;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("design JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("design JSON: ") + e.what());
  }
}

}  // namespace ris
