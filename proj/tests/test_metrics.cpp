#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <json.hpp>

#include "ris/metrics.hpp"

using namespace ris;

namespace {

// Profile whose state phases at each frequency come from `phase_at(state, f)`.
template <typename F>
ReflectionProfile make_profile(int n_states, const Eigen::VectorXd& freqs, F phase_at) {
  ReflectionProfile p;
  for (int s = 0; s < n_states; ++s) p.states.push_back(s);
  p.frequencies = freqs;
  p.gamma.resize(n_states, freqs.size());
  for (int s = 0; s < n_states; ++s) {
    for (Eigen::Index c = 0; c < freqs.size(); ++c) p.gamma(s, c) = polar_deg(1.0, phase_at(s, freqs[c]));
  }
  return p;
}

Eigen::VectorXd uniform_phases(int n) {
  return Eigen::VectorXd::LinSpaced(n, 0.0, 360.0 * (n - 1) / n);
}

}  // namespace

TEST_CASE("circular_gaps") {
  Eigen::Vector2d two(100.0, 260.0);
  auto g = circular_gaps(two);
  CHECK(g[0] == doctest::Approx(160.0));
  CHECK(g[1] == doctest::Approx(200.0));

  Eigen::Vector3d wrapped(350.0, -10.0, 720.0 + 20.0);
  auto gw = circular_gaps(wrapped);
  std::vector<double> sorted(gw.begin(), gw.end());
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[0] == doctest::Approx(0.0));
  CHECK(sorted[1] == doctest::Approx(30.0));
  CHECK(sorted[2] == doctest::Approx(330.0));

  CHECK_THROWS_AS(circular_gaps(Eigen::VectorXd::Zero(1)), std::invalid_argument);
}

TEST_CASE("sigma_phase and effective_bits") {
  // gaps {100, 260}: sqrt((100^3 + 260^3) / 4320)
  CHECK(sigma_phase(Eigen::Vector2d(100.0, 260.0)) == doctest::Approx(65.57438524302).epsilon(1e-12));
  CHECK(sigma_phase(circular_gaps(Eigen::Vector2d(0.0, 100.0))) == doctest::Approx(65.57438524302).epsilon(1e-12));
  // phases {100, 260}: gaps {160, 200}
  CHECK(sigma_phase(circular_gaps(Eigen::Vector2d(100.0, 260.0))) == doctest::Approx(std::sqrt(2800.0)));
  // sqrt(2 * 180^3 / 4320) = 180 / sqrt(12)
  CHECK(sigma_phase(circular_gaps(Eigen::Vector2d(0.0, 180.0))) == doctest::Approx(180.0 / std::sqrt(12.0)));
  // single point collapsed: one gap of 360 -> 360 / sqrt(12)
  CHECK(sigma_phase(circular_gaps(Eigen::Vector3d(5.0, 5.0, 5.0))) == doctest::Approx(360.0 / std::sqrt(12.0)));

  CHECK(effective_bits(65.0) == doctest::Approx(0.6770040329406422).epsilon(1e-12));
  CHECK(effective_bits(360.0 / std::sqrt(12.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(effective_bits(45.0 / std::sqrt(12.0)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(effective_bits(0.0), std::invalid_argument);

  // float instantiation
  Eigen::Vector2f f(0.0f, 180.0f);
  CHECK(sigma_phase(circular_gaps(f)) == doctest::Approx(51.9615f).epsilon(1e-5));
}

TEST_CASE("sigma_threshold") {
  CHECK(sigma_threshold(1) == 65.0);
  CHECK(sigma_threshold(2) == 32.5);
  CHECK(sigma_threshold(3) == 16.25);
  CHECK_THROWS_AS(sigma_threshold(4), std::invalid_argument);
  CHECK_THROWS_AS(sigma_threshold(0), std::invalid_argument);
}

TEST_CASE("uniform n-state phases give exactly log2(n) bits (property)") {
  for (int bits = 1; bits <= 5; ++bits) {
    const int n = 1 << bits;
    const double sigma = sigma_phase(circular_gaps(uniform_phases(n)));
    CHECK(sigma == doctest::Approx(360.0 / (n * std::sqrt(12.0))).epsilon(1e-12));
    CHECK(effective_bits(sigma) == doctest::Approx(double(bits)).epsilon(1e-12));
  }
}

TEST_CASE("sigma invariants (property)") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-720.0, 720.0);
  std::uniform_int_distribution<int> count(2, 16);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = count(rng);
    Eigen::VectorXd ph(n);
    for (auto& v : ph) v = ang(rng);
    const auto gaps = circular_gaps(ph);
    const double s = sigma_phase(gaps);

    CHECK(gaps.sum() == doctest::Approx(360.0).epsilon(1e-12));
    CHECK((gaps.array() >= 0.0).all());

    const double offset = ang(rng);
    CHECK(sigma_phase(circular_gaps((ph.array() + offset).matrix())) == doctest::Approx(s).epsilon(1e-9));

    std::vector<double> shuffled(ph.begin(), ph.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(sigma_phase(circular_gaps(Eigen::Map<Eigen::VectorXd>(shuffled.data(), n))) ==
          doctest::Approx(s).epsilon(1e-12));

    // equal spacing minimizes sum gap^3 at fixed total
    CHECK(s >= 360.0 / (n * std::sqrt(12.0)) * (1.0 - 1e-12));
    CHECK(s <= 360.0 / std::sqrt(12.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("merging two states never lowers sigma (property)") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ang(0.0, 360.0);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::VectorXd ph(6);
    for (auto& v : ph) v = ang(rng);
    const double before = sigma_phase(circular_gaps(ph));
    Eigen::VectorXd merged = ph;
    merged[1] = merged[0];
    CHECK(sigma_phase(circular_gaps(merged)) >= before - 1e-9);
  }
}

TEST_CASE("dropping every second state of a uniform 2^n set loses one bit") {
  for (int bits = 2; bits <= 5; ++bits) {
    const int n = 1 << bits;
    const auto full = uniform_phases(n);
    Eigen::VectorXd half(n / 2);
    for (int i = 0; i < n / 2; ++i) half[i] = full[2 * i];
    CHECK(effective_bits(sigma_phase(circular_gaps(half))) == doctest::Approx(bits - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("sigma_over_frequency") {
  const Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(5, 3e9, 4e9);
  auto p = make_profile(8, freqs, [](int s, double) { return 45.0 * s; });
  auto sig = sigma_over_frequency(p);
  REQUIRE(sig.size() == 5);
  for (double v : sig) CHECK(v == doctest::Approx(45.0 / std::sqrt(12.0)));
}

TEST_CASE("bandwidth on a linear 1-bit phase ramp") {
  // 180 deg at 3.6 GHz falling to 90 deg at the grid edges.
  const Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(401, 3.0e9, 4.2e9);
  auto p = make_profile(2, freqs, [](int s, double f) {
    return s == 0 ? 0.0 : 180.0 - 90.0 * std::abs(f - 3.6e9) / 0.6e9;
  });
  auto r = bandwidth(p, 1, 3.6e9);
  REQUIRE(r.band.has_value());
  const double step = freqs[1] - freqs[0];
  // Two-gap sigma crosses 65 deg where the difference is 180 - sqrt(6100).
  const double offset = 0.6e9 * std::sqrt(6100.0) / 90.0;
  CHECK(std::abs(r.band->first - (3.6e9 - offset)) < step);
  CHECK(std::abs(r.band->second - (3.6e9 + offset)) < step);
  CHECK(r.bandwidth_hz == doctest::Approx(r.band->second - r.band->first));
  CHECK(r.threshold_deg == 65.0);
  CHECK(r.resolution_bits == 1);
  CHECK(r.sigma_deg.size() == 401);
  CHECK(r.n_bit_eff[200] == doctest::Approx(1.0));
}

TEST_CASE("bandwidth edge cases") {
  const Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(11, 3.0e9, 4.0e9);

  SUBCASE("whole grid passes") {
    auto p = make_profile(4, freqs, [](int s, double) { return 90.0 * s; });
    auto r = bandwidth(p, 2, 3.5e9);
    REQUIRE(r.band.has_value());
    CHECK(r.band->first == 3.0e9);
    CHECK(r.band->second == 4.0e9);
    CHECK(r.bandwidth_hz == doctest::Approx(1.0e9));
  }

  SUBCASE("center fails") {
    auto p = make_profile(4, freqs, [](int, double) { return 0.0; });
    auto r = bandwidth(p, 2, 3.5e9);
    CHECK_FALSE(r.band.has_value());
    CHECK(r.bandwidth_hz == 0.0);
  }

  SUBCASE("band stops at the first failing point, not the last passing one") {
    // passes, fails at 3.3 GHz, passes again below
    auto p = make_profile(2, freqs, [](int s, double f) {
      return (s == 0 || std::abs(f - 3.3e9) < 1e6) ? 0.0 : 180.0;
    });
    auto r = bandwidth(p, 1, 3.5e9);
    REQUIRE(r.band.has_value());
    CHECK(r.band->first > 3.3e9);
    CHECK(r.band->first < 3.4e9);
    CHECK(r.band->second == 4.0e9);
  }

  SUBCASE("errors") {
    auto p = make_profile(4, freqs, [](int s, double) { return 90.0 * s; });
    CHECK_THROWS_AS(bandwidth(p, 3, 3.5e9), std::invalid_argument);
    CHECK_THROWS_AS(bandwidth(p, 2, 5e9), RangeError);
  }
}

TEST_CASE("select_states builds a virtual 2-bit surface") {
  const Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(3, 3.5e9, 3.7e9);
  auto p = make_profile(8, freqs, [](int s, double) { return 45.0 * s; });
  const int keep[] = {0, 2, 4, 6};
  auto v = select_states(p, keep);
  CHECK(v.states == std::vector<int>{0, 2, 4, 6});
  CHECK(v.gamma.rows() == 4);
  auto r = bandwidth(v, 2, 3.6e9);
  CHECK(r.sigma_deg[1] == doctest::Approx(25.980762113533157).epsilon(1e-12));
  CHECK(r.bandwidth_hz == doctest::Approx(0.2e9));

  const int bad[] = {0, 9};
  CHECK_THROWS_AS(select_states(p, bad), std::invalid_argument);
}

TEST_CASE("report serialization") {
  const Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(3, 3.5e9, 3.7e9);
  auto p = make_profile(8, freqs, [](int s, double) { return 45.0 * s; });
  auto r = bandwidth(p, 3, 3.6e9);

  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["resolution_bits"] == 3);
  CHECK(j["bandwidth_hz"].get<double>() == doctest::Approx(0.2e9));
  REQUIRE(j.contains("literature"));
  for (const auto& e : j["literature"]) CHECK(e["resolution_bits"] == 3);
  CHECK_FALSE(nlohmann::json::parse(report_to_json(r, false)).contains("literature"));

  const std::string csv = report_to_csv(r);
  CHECK(csv.rfind("freq_hz,sigma_deg,nbit_eff\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  CHECK(literature_bandwidths().size() == 4);
}
