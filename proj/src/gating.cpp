#include "ris/gating.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace ris {

namespace {

void check_uniform(const Sweep& sweep) {
  const Eigen::Index n = sweep.size();
  if (n < 8) throw std::invalid_argument("time_gate: sweep needs at least 8 points, got " + std::to_string(n));
  if (sweep.values.size() != n) throw std::invalid_argument("time_gate: value count does not match grid");
  const double df = (sweep.frequencies[n - 1] - sweep.frequencies[0]) / static_cast<double>(n - 1);
  if (!(df > 0.0)) throw std::invalid_argument("time_gate: frequencies must increase");
  for (Eigen::Index k = 1; k < n; ++k) {
    const double step = sweep.frequencies[k] - sweep.frequencies[k - 1];
    if (std::abs(step - df) > 1e-6 * df) throw std::invalid_argument("time_gate: frequency grid is not uniform");
  }
}

}  // namespace

Sweep synth_multipath(std::span<const PathComponent> paths, const Eigen::Ref<const Eigen::VectorXd>& frequencies) {
  Sweep out{frequencies, Eigen::VectorXcd::Zero(frequencies.size())};
  for (const auto& p : paths) {
    if (!(p.delay_s >= 0.0)) throw std::invalid_argument("synth_multipath: delays must be >= 0");
    const double w = -2.0 * std::numbers::pi * p.delay_s;
    out.values += frequencies.unaryExpr([&](double f) { return p.amplitude * std::polar(1.0, w * f); });
  }
  return out;
}

Eigen::VectorXd kaiser_window(Eigen::Index n, double beta) {
  if (n == 1) return Eigen::VectorXd::Ones(1);
  const double norm = std::cyl_bessel_i(0.0, beta);
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = 2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0;
    w[k] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
  }
  return w;
}

Eigen::VectorXd tukey_gate(const Eigen::Ref<const Eigen::VectorXd>& times, double t_start, double t_stop,
                           double edge_fraction) {
  const double width = t_stop - t_start;
  const double taper = edge_fraction * width / 2.0;
  return times.unaryExpr([=](double t) {
    if (t < t_start || t > t_stop) return 0.0;
    const double from_edge = std::min(t - t_start, t_stop - t);
    if (taper <= 0.0 || from_edge >= taper) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * from_edge / taper));
  });
}

double alias_free_span(const Sweep& sweep) {
  const Eigen::Index n = sweep.size();
  return static_cast<double>(n - 1) / (sweep.frequencies[n - 1] - sweep.frequencies[0]);
}

Sweep time_gate(const Sweep& sweep, const GateSpec& gate) {
  check_uniform(sweep);
  if (!(gate.t_start_s >= 0.0) || !(gate.t_stop_s > gate.t_start_s)) {
    throw std::invalid_argument("time_gate: need 0 <= t_start < t_stop");
  }
  if (!(gate.edge_fraction >= 0.0 && gate.edge_fraction <= 1.0)) {
    throw std::invalid_argument("time_gate: edge fraction must lie in [0, 1]");
  }
  if (gate.zero_padding < 1) throw std::invalid_argument("time_gate: zero padding factor must be >= 1");
  const double span = alias_free_span(sweep);
  if (gate.t_start_s >= span) {
    throw RangeError("time_gate: gate start " + format_double(gate.t_start_s) + " s beyond alias-free span " +
                     format_double(span) + " s");
  }

  const Eigen::Index m = sweep.size();
  const Eigen::Index n = m * gate.zero_padding;
  const Eigen::VectorXd window = kaiser_window(m, gate.kaiser_beta);

  std::vector<Complex> spectrum(static_cast<std::size_t>(n), Complex(0.0));
  for (Eigen::Index k = 0; k < m; ++k) spectrum[static_cast<std::size_t>(k)] = sweep.values[k] * window[k];

  Eigen::FFT<double> fft;
  std::vector<Complex> impulse;
  fft.inv(impulse, spectrum);

  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) * (span / n);
  const Eigen::VectorXd g = tukey_gate(times, gate.t_start_s, gate.t_stop_s, gate.edge_fraction);
  for (Eigen::Index i = 0; i < n; ++i) impulse[static_cast<std::size_t>(i)] *= g[i];

  std::vector<Complex> gated;
  fft.fwd(gated, impulse);

  Sweep out{sweep.frequencies, Eigen::VectorXcd(m)};
  for (Eigen::Index k = 0; k < m; ++k) {
    out.values[k] = gated[static_cast<std::size_t>(k)] / std::max(window[k], kWindowFloor);
  }
  return out;
}

Eigen::Array<bool, Eigen::Dynamic, 1> low_confidence_mask(const Sweep& sweep) {
  const Eigen::Index n = sweep.size();
  Eigen::Array<bool, Eigen::Dynamic, 1> mask(n);
  const double f0 = sweep.frequencies[0];
  const double bw = sweep.frequencies[n - 1] - f0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = bw > 0.0 ? (sweep.frequencies[k] - f0) / bw : 0.5;
    mask[k] = x < 0.1 || x > 0.9;
  }
  return mask;
}

Sweep normalize_to_plate(const Sweep& dut, const Sweep& reference) {
  if (dut.size() != reference.size() || dut.values.size() != dut.size() ||
      reference.values.size() != reference.size()) {
    throw std::invalid_argument("normalize_to_plate: frequency grids differ");
  }
  for (Eigen::Index k = 0; k < dut.size(); ++k) {
    const double f = dut.frequencies[k];
    if (std::abs(f - reference.frequencies[k]) > 1e-9 * std::abs(f)) {
      throw std::invalid_argument("normalize_to_plate: frequency grids differ at index " + std::to_string(k));
    }
    if (!(std::abs(reference.values[k]) > 1e-9)) {
      throw SingularityError("normalize_to_plate: reference magnitude underflow at " + format_double(f) + " Hz");
    }
  }
  return {dut.frequencies, -(dut.values.array() / reference.values.array()).matrix()};
}

Sweep load_sweep_csv(std::string_view text) {
  std::vector<double> f, re, im;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  auto number = [&](std::string_view tok) {
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw ParseError(line_no, "non-numeric field '" + std::string(tok) + "'");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
      }
      if (compact != "freq_hz,re,im") throw ParseError(line_no, "expected header 'freq_hz,re,im'");
      header_seen = true;
      continue;
    }
    std::string_view sv = line;
    const auto c1 = sv.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
    if (c2 == std::string_view::npos || sv.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 3 fields");
    }
    f.push_back(number(sv.substr(0, c1)));
    re.push_back(number(sv.substr(c1 + 1, c2 - c1 - 1)));
    im.push_back(number(sv.substr(c2 + 1)));
    if (f.size() > 1 && !(f.back() > f[f.size() - 2])) throw ParseError(line_no, "non-monotonic frequency");
  }
  if (f.empty()) throw ParseError(0, "sweep CSV has no data rows");
  Sweep s{Eigen::VectorXd(static_cast<Eigen::Index>(f.size())), Eigen::VectorXcd(static_cast<Eigen::Index>(f.size()))};
  for (std::size_t i = 0; i < f.size(); ++i) {
    s.frequencies[static_cast<Eigen::Index>(i)] = f[i];
    s.values[static_cast<Eigen::Index>(i)] = Complex(re[i], im[i]);
  }
  return s;
}

std::string write_sweep_csv(const Sweep& sweep, std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    std::istringstream in{std::string(comment)};
    std::string line;
    while (std::getline(in, line)) out += "# " + line + "\n";
  }
  out += "freq_hz,re,im\n";
  for (Eigen::Index k = 0; k < sweep.size(); ++k) {
    out += format_double(sweep.frequencies[k]) + "," + format_double(sweep.values[k].real()) + "," +
           format_double(sweep.values[k].imag()) + "\n";
  }
  return out;
}

Sweep sweep_from_network(const PortNetwork& net) {
  if (net.n_ports != 1) throw std::invalid_argument("sweep_from_network: expected a 1-port network");
  const auto n = static_cast<Eigen::Index>(net.points.size());
  Sweep s{Eigen::VectorXd(n), Eigen::VectorXcd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    s.frequencies[k] = net.points[static_cast<std::size_t>(k)].frequency_hz;
    s.values[k] = net.points[static_cast<std::size_t>(k)].s(0, 0);
  }
  return s;
}

PortNetwork sweep_to_network(const Sweep& sweep, double reference_impedance) {
  PortNetwork net;
  net.n_ports = 1;
  net.reference_impedance = reference_impedance;
  for (Eigen::Index k = 0; k < sweep.size(); ++k) {
    NetworkPoint p;
    p.frequency_hz = sweep.frequencies[k];
    p.s = Eigen::MatrixXcd::Constant(1, 1, sweep.values[k]);
    net.points.push_back(std::move(p));
  }
  return net;
}

}  // namespace ris
