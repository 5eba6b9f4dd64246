#include "ris/touchstone.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace ris {

namespace {

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = s.find(',', start);
    fields.push_back(trim(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

std::optional<double> to_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

struct OptionLine {
  FrequencyUnit unit = FrequencyUnit::GHz;
  TouchstoneFormat format = TouchstoneFormat::MA;
  double reference_impedance = 50.0;
};

OptionLine parse_option_line(std::string_view line, std::size_t line_no) {
  OptionLine opt;
  auto tokens = split_whitespace(line.substr(1));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string tok = to_upper(tokens[i]);
    if (tok == "HZ" || tok == "KHZ" || tok == "MHZ" || tok == "GHZ") {
      opt.unit = parse_frequency_unit(tok);
    } else if (tok == "RI" || tok == "MA" || tok == "DB") {
      opt.format = parse_format(tok);
    } else if (tok == "S") {
      // the only supported parameter type
    } else if (tok == "Y" || tok == "Z" || tok == "H" || tok == "G") {
      throw ParseError(line_no, "unsupported parameter type '" + std::string(tokens[i]) + "' (only S)");
    } else if (tok == "R") {
      if (i + 1 >= tokens.size()) throw ParseError(line_no, "option line: R without a value");
      auto r = to_double(tokens[++i]);
      if (!r || !(*r > 0.0) || !std::isfinite(*r)) {
        throw ParseError(line_no, "option line: invalid reference impedance '" + std::string(tokens[i]) + "'");
      }
      opt.reference_impedance = *r;
    } else {
      throw ParseError(line_no, "option line: unknown format token '" + std::string(tokens[i]) + "'");
    }
  }
  return opt;
}

Complex decode_pair(TouchstoneFormat format, double a, double b) {
  switch (format) {
    case TouchstoneFormat::RI:
      return {a, b};
    case TouchstoneFormat::MA:
      return polar_deg(a, b);
    case TouchstoneFormat::DB:
      return polar_deg(std::isinf(a) && a < 0 ? 0.0 : std::pow(10.0, a / 20.0), b);
  }
  return {};
}

std::pair<double, double> encode_pair(TouchstoneFormat format, Complex z) {
  switch (format) {
    case TouchstoneFormat::RI:
      return {z.real(), z.imag()};
    case TouchstoneFormat::MA:
      return {std::abs(z), phase_deg(z)};
    case TouchstoneFormat::DB:
      return {20.0 * std::log10(std::abs(z)), phase_deg(z)};
  }
  return {};
}

// Touchstone v1 2-port records list S11 S21 S12 S22.
constexpr std::array<std::pair<int, int>, 4> kTwoPortOrder{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

}  // namespace

void PortNetwork::validate() const {
  if (n_ports < 1) throw std::invalid_argument("PortNetwork: n_ports must be >= 1");
  if (!(reference_impedance > 0.0)) throw std::invalid_argument("PortNetwork: reference impedance must be > 0");
  if (points.empty()) throw std::invalid_argument("PortNetwork: at least one frequency point required");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    if (p.s.rows() != n_ports || p.s.cols() != n_ports) {
      throw std::invalid_argument("PortNetwork: point " + std::to_string(k) + " has wrong matrix size");
    }
    if (k > 0 && !(p.frequency_hz > points[k - 1].frequency_hz)) {
      throw std::invalid_argument("PortNetwork: frequencies must be strictly increasing");
    }
  }
}

Eigen::Index ReflectionProfile::row_of(int state) const {
  auto it = std::find(states.begin(), states.end(), state);
  return it == states.end() ? -1 : static_cast<Eigen::Index>(it - states.begin());
}

void ReflectionProfile::validate() const {
  const auto n = states.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("ReflectionProfile: state count must be a power of two");
  }
  if (!std::is_sorted(states.begin(), states.end()) ||
      std::adjacent_find(states.begin(), states.end()) != states.end()) {
    throw std::invalid_argument("ReflectionProfile: state labels must be unique and ascending");
  }
  if (frequencies.size() == 0) throw std::invalid_argument("ReflectionProfile: empty frequency grid");
  for (Eigen::Index k = 1; k < frequencies.size(); ++k) {
    if (!(frequencies[k] > frequencies[k - 1])) {
      throw std::invalid_argument("ReflectionProfile: frequencies must be strictly increasing");
    }
  }
  if (gamma.rows() != state_count() || gamma.cols() != frequencies.size()) {
    throw std::invalid_argument("ReflectionProfile: gamma grid size mismatch");
  }
  if (!gamma.allFinite()) throw std::invalid_argument("ReflectionProfile: non-finite gamma entry");
}

double unit_scale(FrequencyUnit unit) {
  switch (unit) {
    case FrequencyUnit::Hz: return 1.0;
    case FrequencyUnit::kHz: return 1e3;
    case FrequencyUnit::MHz: return 1e6;
    case FrequencyUnit::GHz: return 1e9;
  }
  return 1.0;
}

std::string_view to_string(TouchstoneFormat format) {
  switch (format) {
    case TouchstoneFormat::RI: return "RI";
    case TouchstoneFormat::MA: return "MA";
    case TouchstoneFormat::DB: return "DB";
  }
  return "";
}

std::string_view to_string(FrequencyUnit unit) {
  switch (unit) {
    case FrequencyUnit::Hz: return "Hz";
    case FrequencyUnit::kHz: return "kHz";
    case FrequencyUnit::MHz: return "MHz";
    case FrequencyUnit::GHz: return "GHz";
  }
  return "";
}

TouchstoneFormat parse_format(std::string_view token) {
  const std::string t = to_upper(token);
  if (t == "RI") return TouchstoneFormat::RI;
  if (t == "MA") return TouchstoneFormat::MA;
  if (t == "DB") return TouchstoneFormat::DB;
  throw std::invalid_argument("unknown Touchstone format '" + std::string(token) + "'");
}

FrequencyUnit parse_frequency_unit(std::string_view token) {
  const std::string t = to_upper(token);
  if (t == "HZ") return FrequencyUnit::Hz;
  if (t == "KHZ") return FrequencyUnit::kHz;
  if (t == "MHZ") return FrequencyUnit::MHz;
  if (t == "GHZ") return FrequencyUnit::GHz;
  throw std::invalid_argument("unknown frequency unit '" + std::string(token) + "'");
}

std::string format_double(double value) {
  if (value == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

PortNetwork parse_touchstone(std::string_view text, std::optional<int> n_ports) {
  if (n_ports && (*n_ports < 1 || *n_ports > 2)) {
    throw ParseError(0, "only 1-port and 2-port Touchstone data is supported");
  }
  std::optional<OptionLine> options;
  PortNetwork net;
  std::size_t expected_values = n_ports ? static_cast<std::size_t>(1 + 2 * *n_ports * *n_ports) : 0;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (auto bang = line.find('!'); bang != std::string_view::npos) line = line.substr(0, bang);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      throw ParseError(line_no, "Touchstone v2 keyword '" + std::string(line) + "' is not supported (v1 only)");
    }
    if (line.front() == '#') {
      if (options) throw ParseError(line_no, "duplicate option line");
      options = parse_option_line(line, line_no);
      continue;
    }
    if (!options) throw ParseError(line_no, "missing option line before data");

    const auto tokens = split_whitespace(line);
    if (expected_values == 0) {
      if (tokens.size() == 3) {
        expected_values = 3;
      } else if (tokens.size() == 9) {
        expected_values = 9;
      } else {
        throw ParseError(line_no, "wrong value count per record: " + std::to_string(tokens.size()) +
                                      " (expected 3 for 1-port or 9 for 2-port)");
      }
    }
    if (tokens.size() != expected_values) {
      throw ParseError(line_no, "wrong value count per record: " + std::to_string(tokens.size()) + " (expected " +
                                    std::to_string(expected_values) + ")");
    }

    std::vector<double> values(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      auto v = to_double(tokens[t]);
      bool ok = v.has_value() && (std::isfinite(*v) ||
                                  (options->format == TouchstoneFormat::DB && t % 2 == 1 && std::isinf(*v) && *v < 0));
      if (!ok) throw ParseError(line_no, "invalid numeric value '" + std::string(tokens[t]) + "'");
      values[t] = *v;
    }

    NetworkPoint point;
    point.frequency_hz = values[0] * unit_scale(options->unit);
    if (!net.points.empty() && !(point.frequency_hz > net.points.back().frequency_hz)) {
      throw ParseError(line_no, "non-monotonic frequency " + std::string(tokens[0]));
    }
    if (expected_values == 3) {
      point.s.resize(1, 1);
      point.s(0, 0) = decode_pair(options->format, values[1], values[2]);
    } else {
      point.s.resize(2, 2);
      for (std::size_t k = 0; k < kTwoPortOrder.size(); ++k) {
        auto [r, c] = kTwoPortOrder[k];
        point.s(r, c) = decode_pair(options->format, values[1 + 2 * k], values[2 + 2 * k]);
      }
    }
    net.points.push_back(std::move(point));
  }

  if (!options) throw ParseError(0, "missing option line");
  if (net.points.empty()) throw ParseError(0, "no data records");
  net.n_ports = expected_values == 3 ? 1 : 2;
  net.reference_impedance = options->reference_impedance;
  return net;
}

std::string serialize_touchstone(const PortNetwork& net, TouchstoneFormat format, FrequencyUnit unit) {
  net.validate();
  if (net.n_ports > 2) throw std::invalid_argument("serialize_touchstone: only 1-port and 2-port supported");

  std::ostringstream os;
  os << "# " << to_string(unit) << " S " << to_string(format) << " R " << format_double(net.reference_impedance)
     << '\n';
  const double scale = unit_scale(unit);
  auto emit = [&](Complex z) {
    auto [a, b] = encode_pair(format, z);
    os << ' ' << format_double(a) << ' ' << format_double(b);
  };
  for (const auto& p : net.points) {
    os << format_double(p.frequency_hz / scale);
    if (net.n_ports == 1) {
      emit(p.s(0, 0));
    } else {
      for (auto [r, c] : kTwoPortOrder) emit(p.s(r, c));
    }
    os << '\n';
  }
  return os.str();
}

ReflectionProfile load_state_csv(std::string_view text) {
  struct Row {
    double mag_db;
    double phase_deg;
  };
  std::map<std::pair<int, double>, Row> rows;
  std::set<int> states;
  std::set<double> freqs;
  bool header_seen = false;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
      }
      if (compact != "freq_hz,state,mag_db,phase_deg") {
        throw ParseError(line_no, "expected header 'freq_hz,state,mag_db,phase_deg'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_commas(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      auto d = to_double(fields[k]);
      const bool zero_magnitude = k == 2 && d && std::isinf(*d) && *d < 0;
      if (!d || (!std::isfinite(*d) && !zero_magnitude)) {
        throw ParseError(line_no, "non-numeric field '" + std::string(fields[k]) + "'");
      }
      v[k] = *d;
    }
    if (v[1] < 0 || v[1] != std::floor(v[1]) || v[1] > 1 << 20) {
      throw ParseError(line_no, "state must be a non-negative integer");
    }
    if (!(v[0] > 0.0)) throw ParseError(line_no, "frequency must be positive");
    const int state = static_cast<int>(v[1]);
    if (!rows.emplace(std::pair{state, v[0]}, Row{v[2], v[3]}).second) {
      throw ParseError(line_no, "duplicate row for state " + std::to_string(state) + " at " +
                                    std::string(fields[0]) + " Hz");
    }
    states.insert(state);
    freqs.insert(v[0]);
  }
  if (!header_seen) throw ParseError(0, "missing header 'freq_hz,state,mag_db,phase_deg'");
  if (rows.empty()) throw ParseError(0, "no data rows");

  std::size_t n_states = 1;
  while (n_states < states.size()) n_states <<= 1;
  std::vector<int> missing;
  for (int s = 0; s < static_cast<int>(n_states); ++s) {
    if (!states.count(s)) missing.push_back(s);
  }
  if (!missing.empty() || *states.rbegin() >= static_cast<int>(n_states)) {
    std::string msg = "incomplete grid: states must be 0..2^n-1";
    if (!missing.empty()) {
      msg += "; missing state";
      for (int s : missing) msg += " " + std::to_string(s);
    }
    throw ParseError(0, msg);
  }
  if (rows.size() != states.size() * freqs.size()) {
    for (int s : states) {
      for (double f : freqs) {
        if (!rows.count({s, f})) {
          throw ParseError(0, "incomplete grid: no row for state " + std::to_string(s) + " at " + format_double(f) +
                                  " Hz");
        }
      }
    }
  }

  ReflectionProfile profile;
  profile.states.assign(states.begin(), states.end());
  profile.frequencies.resize(static_cast<Eigen::Index>(freqs.size()));
  profile.gamma.resize(static_cast<Eigen::Index>(states.size()), static_cast<Eigen::Index>(freqs.size()));
  Eigen::Index col = 0;
  for (double f : freqs) profile.frequencies[col++] = f;
  for (const auto& [key, row] : rows) {
    const Eigen::Index r = profile.row_of(key.first);
    const auto c = static_cast<Eigen::Index>(std::distance(freqs.begin(), freqs.find(key.second)));
    profile.gamma(r, c) = polar_deg(std::pow(10.0, row.mag_db / 20.0), row.phase_deg);
  }
  return profile;
}

std::string write_state_csv(const ReflectionProfile& profile) {
  profile.validate();
  std::ostringstream os;
  os << "freq_hz,state,mag_db,phase_deg\n";
  for (Eigen::Index c = 0; c < profile.frequency_count(); ++c) {
    for (Eigen::Index r = 0; r < profile.state_count(); ++r) {
      const Complex g = profile.gamma(r, c);
      os << format_double(profile.frequencies[c]) << ',' << profile.states[static_cast<std::size_t>(r)] << ','
         << format_double(20.0 * std::log10(std::abs(g))) << ',' << format_double(phase_deg(g)) << '\n';
    }
  }
  return os.str();
}

std::optional<int> touchstone_ports_from_path(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const std::string ext = to_upper(path.substr(dot + 1));
  if (ext.size() < 3 || ext.front() != 'S' || ext.back() != 'P') return std::nullopt;
  int n = 0;
  for (std::size_t i = 1; i + 1 < ext.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(ext[i]))) return std::nullopt;
    n = n * 10 + (ext[i] - '0');
  }
  return n > 0 ? std::optional<int>(n) : std::nullopt;
}

}  // namespace ris
