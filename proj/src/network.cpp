#include "ris/network.hpp"

#include <algorithm>

namespace ris {

namespace {

template <typename Freqs>
std::pair<std::size_t, double> locate(const Freqs& freqs, std::size_t n, double f, const char* what) {
  if (n == 0) throw RangeError(std::string(what) + ": empty sweep");
  const double lo = freqs(0);
  const double hi = freqs(n - 1);
  if (!(f >= lo && f <= hi)) {
    throw RangeError(std::string(what) + ": frequency " + format_double(f) + " Hz outside sweep [" +
                     format_double(lo) + ", " + format_double(hi) + "] Hz");
  }
  // first index with freqs(idx) >= f
  std::size_t a = 0, b = n - 1;
  while (a < b) {
    std::size_t m = (a + b) / 2;
    if (freqs(m) < f) a = m + 1; else b = m;
  }
  if (freqs(a) == f) return {a, 0.0};
  const double t = (f - freqs(a - 1)) / (freqs(a) - freqs(a - 1));
  return {a - 1, t};
}

}  // namespace

Eigen::MatrixXcd interpolate_at(const PortNetwork& net, double frequency_hz) {
  auto freq = [&](std::size_t i) { return net.points[i].frequency_hz; };
  auto [i, t] = locate(freq, net.points.size(), frequency_hz, "interpolate_at");
  if (t == 0.0) return net.points[i].s;
  return (1.0 - t) * net.points[i].s + t * net.points[i + 1].s;
}

TwoPort two_port_at(const PortNetwork& net, double frequency_hz) {
  if (net.n_ports != 2) throw std::invalid_argument("two_port_at: network must be 2-port");
  return TwoPort::from_matrix(frequency_hz, interpolate_at(net, frequency_hz));
}

Eigen::VectorXcd profile_at(const ReflectionProfile& profile, double frequency_hz) {
  auto freq = [&](std::size_t i) { return profile.frequencies[static_cast<Eigen::Index>(i)]; };
  auto [i, t] = locate(freq, static_cast<std::size_t>(profile.frequency_count()), frequency_hz, "profile_at");
  const auto c = static_cast<Eigen::Index>(i);
  if (t == 0.0) return profile.gamma.col(c);
  return (1.0 - t) * profile.gamma.col(c) + t * profile.gamma.col(c + 1);
}

ReflectionProfile profile_from_network(const PortNetwork& unit_cell, const ReflectionProfile& loads) {
  unit_cell.validate();
  loads.validate();
  if (unit_cell.n_ports != 2) throw std::invalid_argument("profile_from_network: unit cell must be a 2-port");
  const double f_lo = loads.frequencies[0];
  const double f_hi = loads.frequencies[loads.frequency_count() - 1];
  if (f_lo < unit_cell.min_frequency() || f_hi > unit_cell.max_frequency()) {
    throw RangeError("profile_from_network: load grid [" + format_double(f_lo) + ", " + format_double(f_hi) +
                     "] Hz not covered by unit-cell sweep [" + format_double(unit_cell.min_frequency()) + ", " +
                     format_double(unit_cell.max_frequency()) + "] Hz");
  }

  ReflectionProfile out = loads;
  for (Eigen::Index c = 0; c < loads.frequency_count(); ++c) {
    const double f = loads.frequencies[c];
    const TwoPort cell = two_port_at(unit_cell, f);
    for (Eigen::Index r = 0; r < loads.state_count(); ++r) {
      try {
        out.gamma(r, c) = cascade_reflection(cell, loads.gamma(r, c));
      } catch (const SingularityError& e) {
        throw SingularityError("state " + std::to_string(loads.states[static_cast<std::size_t>(r)]) + " at " +
                               format_double(f) + " Hz: " + e.what());
      }
    }
  }
  return out;
}

double max_singular_value(const PortNetwork& net) {
  double worst = 0.0;
  for (const auto& p : net.points) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p.s);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

}  // namespace ris
