#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ris/array.hpp"
#include "ris/gating.hpp"
#include "ris/loads.hpp"
#include "ris/metrics.hpp"
#include "ris/network.hpp"
#include "ris/touchstone.hpp"

namespace ris::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double band_low_hz = 3.3e9;  // n78
  double band_high_hz = 3.8e9;
  double f_center_hz = 3.6e9;
  std::optional<int> bits;
  std::string out_path;
  std::string format;
  bool stamp = false;

  void validate() const {
    if (!(band_low_hz < band_high_hz)) throw UsageError("--band-low-hz must be below --band-high-hz");
    if (f_center_hz < band_low_hz || f_center_hz > band_high_hz) {
      throw UsageError("--f-center-hz must lie within the band");
    }
    if (bits && (*bits < 1 || *bits > 3)) throw UsageError("--bits must be 1, 2 or 3");
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i])) != suffix[i]) return false;
  }
  return true;
}

PortNetwork load_touchstone(const std::string& path) {
  return parse_touchstone(read_file(path), touchstone_ports_from_path(path));
}

Sweep load_sweep(const std::string& path) {
  if (touchstone_ports_from_path(path)) return sweep_from_network(load_touchstone(path));
  return load_sweep_csv(read_file(path));
}

std::string stamp_value() {
  const auto now = std::chrono::system_clock::now();
  return std::to_string(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

std::string with_stamp_json(const std::string& json_text, bool stamp) {
  if (!stamp) return json_text;
  auto doc = nlohmann::ordered_json::parse(json_text);
  doc["generated_at_unix_s"] = stamp_value();
  return doc.dump(2) + "\n";
}

std::string with_stamp_csv(const std::string& csv_text, bool stamp) {
  return stamp ? "# generated_at_unix_s=" + stamp_value() + "\n" + csv_text : csv_text;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& data) {
  if (cfg.out_path.empty()) {
    out << data;
    return;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + cfg.out_path + "'");
  file << data;
}

std::string resolve_format(const RunConfig& cfg, std::string_view fallback,
                           std::initializer_list<std::string_view> allowed) {
  const std::string fmt = cfg.format.empty() ? std::string(fallback) : cfg.format;
  for (auto a : allowed) {
    if (fmt == a) return fmt;
  }
  throw UsageError("--format " + fmt + " is not available for this command");
}

// parse ---------------------------------------------------------------------

void cmd_parse(const RunConfig& cfg, const std::string& path, std::ostream& out) {
  const std::string fmt = resolve_format(cfg, "text", {"text", "json"});
  nlohmann::ordered_json doc;
  std::ostringstream text;
  if (touchstone_ports_from_path(path)) {
    const PortNetwork net = load_touchstone(path);
    doc = {{"kind", "touchstone"},
           {"n_ports", net.n_ports},
           {"points", net.size()},
           {"f_min_hz", net.min_frequency()},
           {"f_max_hz", net.max_frequency()},
           {"reference_impedance_ohm", net.reference_impedance}};
    text << "touchstone: n_ports = " << net.n_ports << ", " << net.size() << " points, "
         << format_double(net.min_frequency()) << " .. " << format_double(net.max_frequency()) << " Hz, R "
         << format_double(net.reference_impedance) << " ohm\n";
  } else {
    const std::string content = read_file(path);
    if (content.find("freq_hz,re,im") != std::string::npos) {
      const Sweep s = load_sweep_csv(content);
      doc = {{"kind", "sweep"},
             {"points", s.size()},
             {"f_min_hz", s.frequencies[0]},
             {"f_max_hz", s.frequencies[s.size() - 1]}};
      text << "sweep: " << s.size() << " points, " << format_double(s.frequencies[0]) << " .. "
           << format_double(s.frequencies[s.size() - 1]) << " Hz\n";
    } else {
      const ReflectionProfile p = load_state_csv(content);
      const double f0 = p.frequencies[0], f1 = p.frequencies[p.frequency_count() - 1];
      doc = {{"kind", "state_csv"},
             {"states", p.state_count()},
             {"frequencies", p.frequency_count()},
             {"f_min_hz", f0},
             {"f_max_hz", f1}};
      text << p.state_count() << " states, " << p.frequency_count() << " frequencies, " << format_double(f0)
           << " .. " << format_double(f1) << " Hz\n";
    }
  }
  emit(cfg, out, fmt == "json" ? with_stamp_json(doc.dump(2) + "\n", cfg.stamp) : text.str());
}

// profile / synth -----------------------------------------------------------

struct LineArgs {
  MicrostripLine line;
  bool ref_given = false;
};

void add_line_options(CLI::App* cmd, LineArgs& args) {
  cmd->add_option("--line-width-m", args.line.width_m, "Microstrip width")->capture_default_str();
  cmd->add_option("--substrate-height-m", args.line.substrate_height_m, "Substrate height")->capture_default_str();
  cmd->add_option("--epsilon-r", args.line.epsilon_r, "Substrate relative permittivity")->capture_default_str();
  cmd->add_option("--loss-db-per-m", args.line.loss_db_per_m, "Line loss at the reference frequency")
      ->capture_default_str();
  cmd->add_option("--loss-ref-hz", args.line.reference_frequency_hz, "Reference frequency of the loss figure")
      ->capture_default_str();
}

MicrostripLine finish_line(const LineArgs& args, const RunConfig& cfg) {
  MicrostripLine line = args.line;
  if (!args.ref_given) line.reference_frequency_hz = cfg.f_center_hz;
  line.validate();
  return line;
}

void cmd_profile(const RunConfig& cfg, const std::string& unit_cell_path, const std::string& loads_source,
                 const LineArgs& line_args, std::ostream& out) {
  const std::string fmt = resolve_format(cfg, "csv", {"csv", "json"});
  const PortNetwork cell = load_touchstone(unit_cell_path);
  if (cell.n_ports != 2) throw InputError("unit cell '" + unit_cell_path + "' must be a 2-port network");
  std::vector<double> grid;
  for (const auto& p : cell.points) grid.push_back(p.frequency_hz);

  ReflectionProfile loads;
  if (loads_source == "ideal-1bit") {
    loads = spdt_load_profile(SwitchModel::ideal(), grid);
  } else if (loads_source == "ideal-3bit") {
    const MicrostripLine line = finish_line(line_args, cfg);
    const auto design = synthesize_stub_lengths(SwitchModel::ideal(), line, cfg.f_center_hz,
                                                {cfg.f_center_hz, cfg.f_center_hz});
    loads = sp8t_load_profile(design, grid);
  } else if (ends_with(loads_source, ".json")) {
    const auto design = design_from_json(read_file(loads_source), [](const std::string& p) {
      return load_touchstone(p);
    });
    loads = sp8t_load_profile(design, grid);
  } else if (touchstone_ports_from_path(loads_source)) {
    SwitchModel sw(load_touchstone(loads_source));
    sw.source = loads_source;
    loads = spdt_load_profile(sw, grid);
  } else {
    throw UsageError("--loads must be ideal-1bit, ideal-3bit, a design .json or a switch .s2p");
  }

  const ReflectionProfile profile = profile_from_network(cell, loads);
  if (fmt == "csv") {
    emit(cfg, out, with_stamp_csv(write_state_csv(profile), cfg.stamp));
    return;
  }
  nlohmann::ordered_json doc;
  doc["states"] = profile.states;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < profile.frequency_count(); ++c) {
    for (Eigen::Index r = 0; r < profile.state_count(); ++r) {
      const Complex g = profile.gamma(r, c);
      rows.push_back({{"freq_hz", profile.frequencies[c]},
                      {"state", profile.states[static_cast<std::size_t>(r)]},
                      {"mag_db", 20.0 * std::log10(std::abs(g))},
                      {"phase_deg", phase_deg(g)}});
    }
  }
  doc["rows"] = std::move(rows);
  emit(cfg, out, with_stamp_json(doc.dump(2) + "\n", cfg.stamp));
}

void cmd_synth(const RunConfig& cfg, const std::string& switch_source, const LineArgs& line_args, int band_points,
               bool full_band, std::ostream& out) {
  const std::string fmt = resolve_format(cfg, "json", {"json", "text"});
  const MicrostripLine line = finish_line(line_args, cfg);
  SwitchModel sw;
  if (switch_source != "ideal") {
    sw = SwitchModel(load_touchstone(switch_source));
    sw.source = switch_source;
  }
  SynthesisOptions opts;
  opts.state_count = 1 << cfg.bits.value_or(3);
  opts.band_points = band_points;
  // Unless asked otherwise, optimize over the largest sub-band centered on
  // f_center so the phase error is balanced around the design frequency.
  FrequencyBand band{cfg.band_low_hz, cfg.band_high_hz};
  if (!full_band) {
    const double half = std::min(cfg.f_center_hz - cfg.band_low_hz, cfg.band_high_hz - cfg.f_center_hz);
    band = {cfg.f_center_hz - half, cfg.f_center_hz + half};
  }
  const auto design = synthesize_stub_lengths(sw, line, cfg.f_center_hz, band, {}, opts);
  if (fmt == "json") {
    auto doc = nlohmann::ordered_json::parse(design_to_json(design));
    doc["synthesis_band_hz"] = {band.low_hz, band.high_hz};
    emit(cfg, out, with_stamp_json(doc.dump(2) + "\n", cfg.stamp));
    return;
  }
  const double lambda_g = guided_wavelength(line, cfg.f_center_hz);
  std::ostringstream os;
  os << "state termination length_m electrical_deg residual_deg\n";
  for (const auto& st : design.states) {
    os << st.state << ' ' << to_string(st.termination) << ' ' << format_double(st.length_m) << ' '
       << format_double(360.0 * st.length_m / lambda_g) << ' ' << format_double(st.residual_deg) << '\n';
  }
  emit(cfg, out, os.str());
}

// bandwidth -----------------------------------------------------------------

int bits_for_states(Eigen::Index n) {
  for (int b = 1; b <= 3; ++b) {
    if (n == (Eigen::Index{1} << b)) return b;
  }
  throw UsageError("profile has " + std::to_string(n) + " states; expected 2, 4 or 8");
}

void cmd_bandwidth(const RunConfig& cfg, const std::string& path, bool virtual_2bit, std::ostream& out) {
  const std::string fmt = resolve_format(cfg, "json", {"json", "csv", "text"});
  ReflectionProfile profile = load_state_csv(read_file(path));
  if (virtual_2bit) {
    if (profile.state_count() != 8) throw UsageError("--virtual-2bit needs an 8-state profile");
    if (cfg.bits && *cfg.bits != 2) throw UsageError("--virtual-2bit implies --bits 2");
    const std::array<int, 4> even{0, 2, 4, 6};
    profile = select_states(profile, even);
  }
  const int bits = cfg.bits.value_or(bits_for_states(profile.state_count()));
  if (profile.state_count() != (Eigen::Index{1} << bits)) {
    throw UsageError("--bits " + std::to_string(bits) + " does not match the profile's " +
                     std::to_string(profile.state_count()) + " states");
  }
  const BandwidthReport report = bandwidth(profile, bits, cfg.f_center_hz);
  if (fmt == "json") {
    emit(cfg, out, with_stamp_json(report_to_json(report), cfg.stamp));
  } else if (fmt == "csv") {
    emit(cfg, out, with_stamp_csv(report_to_csv(report), cfg.stamp));
  } else {
    std::ostringstream os;
    os << "resolution_bits: " << bits << '\n'
       << "threshold_deg: " << format_double(report.threshold_deg) << '\n';
    if (report.band) {
      os << "band_hz: " << format_double(report.band->first) << " .. " << format_double(report.band->second) << '\n';
    } else {
      os << "band_hz: none\n";
    }
    os << "bandwidth_hz: " << format_double(report.bandwidth_hz) << '\n';
    emit(cfg, out, os.str());
  }
}

// pattern -------------------------------------------------------------------

struct PatternArgs {
  int tiles_x = 6;
  int tiles_y = 6;
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  std::optional<double> freq_hz;
  double theta_min = -90.0;
  double theta_max = 90.0;
  double theta_step = 0.5;
  double element_exponent = 1.0;
  std::string state_map_path;
};

void cmd_pattern(const RunConfig& cfg, const std::string& path, const PatternArgs& a, std::ostream& out,
                 std::ostream& err) {
  const std::string fmt = resolve_format(cfg, "csv", {"csv", "json"});
  const ReflectionProfile profile = load_state_csv(read_file(path));
  const int bits = bits_for_states(profile.state_count());
  if (cfg.bits && *cfg.bits != bits) throw UsageError("--bits does not match the profile's state count");
  if (bits == 2) throw UsageError("tile layouts exist for 1-bit and 3-bit resolution only");
  if (!(a.theta_step > 0.0) || a.theta_max < a.theta_min) throw UsageError("invalid theta grid");

  const double f = a.freq_hz.value_or(cfg.f_center_hz);
  const ArrayLayout layout = build_array(a.tiles_x, a.tiles_y, bits);
  const Eigen::VectorXcd gammas = profile_at(profile, f);
  const Codebook cb = steering_codebook(layout, gammas, {a.theta_deg, a.phi_deg}, f);

  std::vector<Direction> grid;
  const auto steps = static_cast<long>(std::floor((a.theta_max - a.theta_min) / a.theta_step + 1e-9));
  for (long i = 0; i <= steps; ++i) grid.push_back({a.theta_min + static_cast<double>(i) * a.theta_step, a.phi_deg});
  const Eigen::VectorXcd af = array_factor(layout, cb.states, gammas, f, grid, a.element_exponent);
  const Eigen::VectorXd db = normalized_db(af);
  Eigen::Index peak = 0;
  af.cwiseAbs().maxCoeff(&peak);

  if (!a.state_map_path.empty()) {
    std::ofstream sm(a.state_map_path, std::ios::binary);
    if (!sm) throw InputError("cannot write '" + a.state_map_path + "'");
    sm << (ends_with(a.state_map_path, ".json") ? state_map_to_json(layout, cb.states) : state_map_to_text(cb.states));
  }

  const double power_mw = power_consumption(layout) * 1e3;
  std::ostringstream summary;
  summary << "cells: " << layout.cell_count() << '\n'
          << "area_m2: " << format_double(layout.area_m2()) << '\n'
          << "power_mw: " << format_double(power_mw) << '\n'
          << "peak_theta_deg: " << format_double(grid[static_cast<std::size_t>(peak)].theta_deg) << '\n'
          << "max_residual_deg: " << format_double(cb.residual_deg.maxCoeff()) << '\n';

  if (fmt == "csv") {
    emit(cfg, out, with_stamp_csv(pattern_to_csv(grid, db), cfg.stamp));
    (cfg.out_path.empty() ? err : out) << summary.str();
    return;
  }
  nlohmann::ordered_json doc;
  doc["cells"] = layout.cell_count();
  doc["area_m2"] = layout.area_m2();
  doc["power_mw"] = power_mw;
  doc["peak_theta_deg"] = grid[static_cast<std::size_t>(peak)].theta_deg;
  doc["max_residual_deg"] = cb.residual_deg.maxCoeff();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rows.push_back({{"theta_deg", grid[i].theta_deg},
                    {"phi_deg", grid[i].phi_deg},
                    {"af_db", db[static_cast<Eigen::Index>(i)]}});
  }
  doc["pattern"] = std::move(rows);
  emit(cfg, out, with_stamp_json(doc.dump(2) + "\n", cfg.stamp));
}

// gate ----------------------------------------------------------------------

void cmd_gate(const RunConfig& cfg, const std::string& path, const GateSpec& gate, const std::string& reference_path,
              bool normalize, std::ostream& out) {
  if (normalize && reference_path.empty()) throw UsageError("--normalize requires --reference");
  if (!normalize && !reference_path.empty()) throw UsageError("--reference is only used with --normalize");
  const bool to_touchstone = touchstone_ports_from_path(cfg.out_path).has_value();
  const std::string fmt = resolve_format(cfg, "csv", {"csv"});
  (void)fmt;

  Sweep result = time_gate(load_sweep(path), gate);
  if (normalize) result = normalize_to_plate(result, time_gate(load_sweep(reference_path), gate));

  if (to_touchstone) {
    emit(cfg, out, serialize_touchstone(sweep_to_network(result), TouchstoneFormat::RI, FrequencyUnit::Hz));
    return;
  }
  const auto mask = low_confidence_mask(result);
  double inner_lo = result.frequencies[result.size() - 1], inner_hi = result.frequencies[0];
  for (Eigen::Index k = 0; k < result.size(); ++k) {
    if (!mask[k]) {
      inner_lo = std::min(inner_lo, result.frequencies[k]);
      inner_hi = std::max(inner_hi, result.frequencies[k]);
    }
  }
  const std::string meta = "gate_s=" + format_double(gate.t_start_s) + ".." + format_double(gate.t_stop_s) +
                           "\nconfident_band_hz=" + format_double(inner_lo) + ".." + format_double(inner_hi) +
                           (normalize ? "\nnormalized_to_plate=1" : "");
  emit(cfg, out, with_stamp_csv(write_sweep_csv(result, meta), cfg.stamp));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reflective surface network modeling toolkit", "ris"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--band-low-hz", cfg.band_low_hz, "Band lower edge")->capture_default_str();
  app.add_option("--band-high-hz", cfg.band_high_hz, "Band upper edge")->capture_default_str();
  app.add_option("--f-center-hz", cfg.f_center_hz, "Center frequency")->capture_default_str();
  app.add_option("--bits", cfg.bits, "Phase resolution in bits")->check(CLI::Range(1, 3));
  app.add_option("--out", cfg.out_path, "Output file (default stdout)");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_flag("--stamp", cfg.stamp, "Add a generation timestamp to the output");

  std::string input;

  auto* parse = app.add_subcommand("parse", "Summarize a Touchstone, state CSV or sweep CSV file");
  parse->add_option("file", input, "Input file")->required();

  std::string unit_cell, loads_source;
  LineArgs profile_line;
  auto* profile = app.add_subcommand("profile", "Cascade load states through a unit-cell two-port");
  profile->add_option("--unit-cell", unit_cell, "Unit-cell .s2p")->required();
  profile->add_option("--loads", loads_source, "ideal-1bit | ideal-3bit | design.json | switch.s2p")->required();
  add_line_options(profile, profile_line);

  std::string switch_source = "ideal";
  LineArgs synth_line;
  int band_points = 21;
  auto* synth = app.add_subcommand("synth", "Synthesize stub lengths for the switched-line network");
  synth->add_option("--switch", switch_source, "ideal or a switch .s2p")->capture_default_str();
  synth->add_option("--band-points", band_points, "Band samples for the phase objective")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bool full_band = false;
  synth->add_flag("--full-band", full_band, "Optimize over the whole band instead of the centered sub-band");
  add_line_options(synth, synth_line);

  bool virtual_2bit = false;
  auto* bw = app.add_subcommand("bandwidth", "Phase-resolution bandwidth of a state profile");
  bw->add_option("profile", input, "State CSV")->required();
  bw->add_flag("--virtual-2bit", virtual_2bit, "Use states 0, 2, 4 and 6 of an 8-state profile");

  PatternArgs pattern_args;
  auto* pattern = app.add_subcommand("pattern", "Steering codebook and far-field pattern");
  pattern->add_option("profile", input, "State CSV")->required();
  pattern->add_option("--tiles-x", pattern_args.tiles_x, "Tiles along x")->capture_default_str();
  pattern->add_option("--tiles-y", pattern_args.tiles_y, "Tiles along y")->capture_default_str();
  pattern->add_option("--theta-deg", pattern_args.theta_deg, "Steering angle from broadside")->capture_default_str();
  pattern->add_option("--phi-deg", pattern_args.phi_deg, "Steering azimuth and pattern cut")->capture_default_str();
  pattern->add_option("--freq-hz", pattern_args.freq_hz, "Evaluation frequency (default f_center)");
  pattern->add_option("--theta-min", pattern_args.theta_min)->capture_default_str();
  pattern->add_option("--theta-max", pattern_args.theta_max)->capture_default_str();
  pattern->add_option("--theta-step", pattern_args.theta_step)->capture_default_str();
  pattern->add_option("--element-exponent", pattern_args.element_exponent, "cos^q element factor")
      ->capture_default_str();
  pattern->add_option("--state-map", pattern_args.state_map_path, "Write the state map (.json or text grid)");

  GateSpec gate;
  std::string reference_path;
  bool normalize = false;
  auto* gate_cmd = app.add_subcommand("gate", "Time-gate a sweep and optionally normalize to a plate");
  gate_cmd->add_option("sweep", input, "Sweep (.s1p or CSV freq_hz,re,im)")->required();
  gate_cmd->add_option("--t-start-s", gate.t_start_s, "Gate start")->required();
  gate_cmd->add_option("--t-stop-s", gate.t_stop_s, "Gate stop")->required();
  gate_cmd->add_option("--edge-fraction", gate.edge_fraction, "Tukey taper fraction")->capture_default_str();
  gate_cmd->add_option("--kaiser-beta", gate.kaiser_beta, "Kaiser pre-window beta")->capture_default_str();
  gate_cmd->add_option("--reference", reference_path, "Metal plate reference sweep");
  gate_cmd->add_flag("--normalize", normalize, "Normalize to the reference plate");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    cfg.validate();
    synth_line.ref_given = synth->count("--loss-ref-hz") > 0;
    profile_line.ref_given = profile->count("--loss-ref-hz") > 0;
    if (*parse) cmd_parse(cfg, input, out);
    else if (*profile) cmd_profile(cfg, unit_cell, loads_source, profile_line, out);
    else if (*synth) cmd_synth(cfg, switch_source, synth_line, band_points, full_band, out);
    else if (*bw) cmd_bandwidth(cfg, input, virtual_2bit, out);
    else if (*pattern) cmd_pattern(cfg, input, pattern_args, out, err);
    else if (*gate_cmd) cmd_gate(cfg, input, gate, reference_path, normalize, out);
    return kSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsageError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace ris::cli
