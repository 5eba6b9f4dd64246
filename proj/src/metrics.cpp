#include "ris/metrics.hpp"

#include <array>
#include <set>

#include <json.hpp>

namespace ris {

namespace {

constexpr std::array<LiteratureEntry, 4> kLiterature{{
    {"Rains", 3.5, 1, 255.0},
    {"Zhu", 3.5, 2, 109.0},
    {"Dey", 3.8, 2, 190.0},
    {"Dey", 4.2, 3, 85.0},
}};

double crossing(double f_pass, double s_pass, double f_fail, double s_fail, double threshold) {
  return f_pass + (threshold - s_pass) / (s_fail - s_pass) * (f_fail - f_pass);
}

}  // namespace

double sigma_threshold(int resolution_bits) {
  switch (resolution_bits) {
    case 1: return 65.0;
    case 2: return 32.5;
    case 3: return 16.25;
    default:
      throw std::invalid_argument("sigma_threshold: unsupported resolution " + std::to_string(resolution_bits) +
                                  " (1, 2 or 3 bits)");
  }
}

std::span<const LiteratureEntry> literature_bandwidths() { return kLiterature; }

Eigen::VectorXd sigma_over_frequency(const ReflectionProfile& profile) {
  Eigen::VectorXd sigma(profile.frequency_count());
  for (Eigen::Index c = 0; c < profile.frequency_count(); ++c) {
    const Eigen::VectorXd phases = profile.gamma.col(c).unaryExpr([](const Complex& z) { return phase_deg(z); });
    sigma[c] = sigma_phase(circular_gaps(phases));
  }
  return sigma;
}

BandwidthReport bandwidth(const ReflectionProfile& profile, int resolution_bits, double f_center_hz) {
  profile.validate();
  const double threshold = sigma_threshold(resolution_bits);
  if (profile.state_count() != (Eigen::Index{1} << resolution_bits)) {
    throw std::invalid_argument("bandwidth: profile has " + std::to_string(profile.state_count()) +
                                " states, expected " + std::to_string(1 << resolution_bits));
  }
  const auto& f = profile.frequencies;
  const Eigen::Index n = f.size();
  if (!(f_center_hz >= f[0] && f_center_hz <= f[n - 1])) {
    throw RangeError("bandwidth: center frequency " + format_double(f_center_hz) + " Hz outside profile grid");
  }

  BandwidthReport report;
  report.resolution_bits = resolution_bits;
  report.f_center_hz = f_center_hz;
  report.frequencies = f;
  report.threshold_deg = threshold;
  report.sigma_deg = sigma_over_frequency(profile);
  report.n_bit_eff = report.sigma_deg.unaryExpr([](double s) { return effective_bits(s); });
  report.min_magnitude_db = profile.gamma.cwiseAbs().colwise().minCoeff().transpose().unaryExpr(
      [](double m) { return 20.0 * std::log10(m); });
  const auto& sigma = report.sigma_deg;

  // Grid points at or below / at or above the center.
  Eigen::Index right = 0;
  while (f[right] < f_center_hz) ++right;
  const Eigen::Index left = f[right] == f_center_hz ? right : right - 1;
  const double sigma_center =
      left == right ? sigma[left]
                    : sigma[left] + (f_center_hz - f[left]) / (f[right] - f[left]) * (sigma[right] - sigma[left]);
  if (sigma_center > threshold) return report;

  double lo = f[0];
  {
    double f_prev = f_center_hz, s_prev = sigma_center;
    for (Eigen::Index k = left; k >= 0; --k) {
      if (sigma[k] > threshold) {
        lo = crossing(f_prev, s_prev, f[k], sigma[k], threshold);
        break;
      }
      f_prev = f[k];
      s_prev = sigma[k];
    }
  }
  double hi = f[n - 1];
  {
    double f_prev = f_center_hz, s_prev = sigma_center;
    for (Eigen::Index k = right; k < n; ++k) {
      if (sigma[k] > threshold) {
        hi = crossing(f_prev, s_prev, f[k], sigma[k], threshold);
        break;
      }
      f_prev = f[k];
      s_prev = sigma[k];
    }
  }
  report.band = std::pair{lo, hi};
  report.bandwidth_hz = hi - lo;
  return report;
}

ReflectionProfile select_states(const ReflectionProfile& profile, std::span<const int> indices) {
  profile.validate();
  const auto n = indices.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("select_states: state count " + std::to_string(n) + " is not a power of two");
  }
  std::set<int> wanted(indices.begin(), indices.end());
  if (wanted.size() != n) throw std::invalid_argument("select_states: duplicate state index");

  ReflectionProfile out;
  out.frequencies = profile.frequencies;
  out.gamma.resize(static_cast<Eigen::Index>(n), profile.frequency_count());
  Eigen::Index r = 0;
  for (int s : wanted) {
    const Eigen::Index src = profile.row_of(s);
    if (src < 0) throw std::invalid_argument("select_states: unknown state " + std::to_string(s));
    out.states.push_back(s);
    out.gamma.row(r++) = profile.gamma.row(src);
  }
  return out;
}

std::string report_to_json(const BandwidthReport& report, bool include_literature) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["resolution_bits"] = report.resolution_bits;
  doc["f_center_hz"] = report.f_center_hz;
  doc["threshold_deg"] = report.threshold_deg;
  if (report.band) {
    doc["band"] = {{"f_low_hz", report.band->first}, {"f_high_hz", report.band->second}};
  } else {
    doc["band"] = nullptr;
  }
  doc["bandwidth_hz"] = report.bandwidth_hz;
  ordered_json rows = ordered_json::array();
  for (Eigen::Index k = 0; k < report.frequencies.size(); ++k) {
    rows.push_back({{"freq_hz", report.frequencies[k]},
                    {"sigma_deg", report.sigma_deg[k]},
                    {"nbit_eff", report.n_bit_eff[k]},
                    {"min_mag_db", report.min_magnitude_db[k]}});
  }
  doc["points"] = std::move(rows);
  if (include_literature) {
    ordered_json lit = ordered_json::array();
    for (const auto& e : literature_bandwidths()) {
      if (e.resolution_bits != report.resolution_bits) continue;
      lit.push_back({{"reference", e.reference},
                     {"f_center_ghz", e.f_center_ghz},
                     {"resolution_bits", e.resolution_bits},
                     {"bandwidth_mhz", e.bandwidth_mhz}});
    }
    doc["literature"] = std::move(lit);
  }
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const BandwidthReport& report) {
  std::string out = "freq_hz,sigma_deg,nbit_eff\n";
  for (Eigen::Index k = 0; k < report.frequencies.size(); ++k) {
    out += format_double(report.frequencies[k]) + "," + format_double(report.sigma_deg[k]) + "," +
           format_double(report.n_bit_eff[k]) + "\n";
  }
  return out;
}

}  // namespace ris
