#include <doctest.h>

#include <random>

#include <json.hpp>

#include "ris/array.hpp"

using namespace ris;

namespace {

Eigen::VectorXcd ideal_gammas(int bits) {
  const int n = 1 << bits;
  Eigen::VectorXcd g(n);
  for (int s = 0; s < n; ++s) g[s] = polar_deg(1.0, 360.0 * s / n);
  return g;
}

// Plain double loop over cells, independent of the library's vectorized sum.
Complex brute_af(const ArrayLayout& l, const StateMap& m, const Eigen::VectorXcd& g, double f, Direction d, double q) {
  const double k = 2.0 * std::numbers::pi * f / kSpeedOfLight;
  const double t = d.theta_deg * std::numbers::pi / 180.0, p = d.phi_deg * std::numbers::pi / 180.0;
  Complex sum = 0.0;
  for (int r = 0; r < l.cells_y(); ++r) {
    const double y = (r - (l.cells_y() - 1) / 2.0) * l.pitch_y_m;
    for (int c = 0; c < l.cells_x(); ++c) {
      const double x = (c - (l.cells_x() - 1) / 2.0) * l.pitch_x_m;
      sum += g[m(r, c)] * std::exp(Complex(0.0, k * std::sin(t) * (x * std::cos(p) + y * std::sin(p))));
    }
  }
  return std::pow(std::cos(t), q) * sum;
}

std::vector<Direction> theta_cut(double lo, double hi, double step, double phi = 0.0) {
  std::vector<Direction> dirs;
  for (double t = lo; t <= hi + 1e-9; t += step) dirs.push_back({t, phi});
  return dirs;
}

}  // namespace

TEST_CASE("build_array geometry") {
  auto a = build_array(6, 6, 3);
  CHECK(a.cell_count() == 576);
  CHECK(a.cells_x() == 24);
  CHECK(a.area_m2() == doctest::Approx(1.5552).epsilon(1e-12));
  CHECK(a.column_positions().sum() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a.column_positions()[1] - a.column_positions()[0] == doctest::Approx(0.060));
  CHECK(a.row_positions()[1] - a.row_positions()[0] == doctest::Approx(0.045));
  CHECK(a.column_positions()[23] == doctest::Approx(11.5 * 0.060));

  CHECK(build_array(1, 1, 1).cell_count() == 16);
  CHECK_THROWS_AS(build_array(0, 6, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_array(6, 6, 2), std::invalid_argument);
}

TEST_CASE("steering_codebook") {
  const double f = 3.6e9;
  auto a = build_array(6, 6, 3);

  auto broad = steering_codebook(a, ideal_gammas(3), {0.0, 0.0}, f);
  CHECK((broad.states.array() == 0).all());
  CHECK(broad.residual_deg.maxCoeff() == 0.0);

  auto b3 = steering_codebook(a, ideal_gammas(3), {30.0, 45.0}, f);
  CHECK(b3.residual_deg.maxCoeff() <= 22.5 + 1e-9);
  auto a1 = build_array(6, 6, 1);
  auto b1 = steering_codebook(a1, ideal_gammas(1), {30.0, 45.0}, f);
  CHECK(b1.residual_deg.maxCoeff() <= 90.0 + 1e-9);
  CHECK((b1.states.array() >= 0 && b1.states.array() <= 1).all());

  CHECK_THROWS_AS(steering_codebook(a, ideal_gammas(1), {10.0, 0.0}, f), std::invalid_argument);
  CHECK_THROWS_AS(steering_codebook(a, ideal_gammas(3), {90.0, 0.0}, f), std::invalid_argument);
  CHECK_THROWS_AS(steering_codebook(a, ideal_gammas(3), {-1.0, 0.0}, f), std::invalid_argument);
}

TEST_CASE("codebook residuals stay within half a phase step (property)") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> theta(0.0, 89.0), phi(-180.0, 180.0), freq(3.3e9, 3.8e9);
  std::uniform_int_distribution<int> tiles(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const int bits = trial % 2 == 0 ? 1 : 3;
    auto a = build_array(tiles(rng), tiles(rng), bits);
    auto cb = steering_codebook(a, ideal_gammas(bits), {theta(rng), phi(rng)}, freq(rng));
    CHECK(cb.residual_deg.maxCoeff() <= 180.0 / (1 << bits) + 1e-9);
  }
}

TEST_CASE("array_factor") {
  const double f = 3.6e9;
  auto a = build_array(6, 6, 3);
  const auto g = ideal_gammas(3);

  SUBCASE("uniform surface at broadside sums coherently") {
    StateMap zero = StateMap::Zero(a.cells_y(), a.cells_x());
    const Direction broadside[] = {{0.0, 0.0}};
    CHECK(std::abs(array_factor(a, zero, g, f, broadside)[0] - Complex(576.0)) < 1e-9);
  }

  SUBCASE("all-zero reflection") {
    StateMap zero = StateMap::Zero(a.cells_y(), a.cells_x());
    Eigen::VectorXcd absorb = Eigen::VectorXcd::Zero(8);
    const auto dirs = theta_cut(-90.0, 90.0, 5.0);
    auto af = array_factor(a, zero, absorb, f, dirs);
    CHECK(af.cwiseAbs().maxCoeff() == 0.0);
    CHECK((normalized_db(af).array() == -300.0).all());
  }

  SUBCASE("20 deg steer peaks at 20 deg") {
    auto cb = steering_codebook(a, g, {20.0, 0.0}, f);
    const auto dirs = theta_cut(-90.0, 90.0, 0.1);
    auto db = normalized_db(array_factor(a, cb.states, g, f, dirs));
    Eigen::Index peak = 0;
    db.maxCoeff(&peak);
    CHECK(std::abs(dirs[static_cast<std::size_t>(peak)].theta_deg - 20.0) <= 1.0);
    CHECK(db[peak] == 0.0);
  }

  SUBCASE("matches a brute-force sum") {
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> st(0, 7);
    auto small = build_array(2, 1, 3);
    StateMap m(small.cells_y(), small.cells_x());
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) m(r, c) = st(rng);
    }
    const Direction dirs[] = {{0.0, 0.0}, {17.0, 30.0}, {-45.0, 0.0}, {60.0, -120.0}, {89.0, 90.0}};
    for (double q : {0.0, 1.0, 1.5}) {
      auto af = array_factor(small, m, g, f, dirs, q);
      for (std::size_t d = 0; d < 5; ++d) {
        CHECK(std::abs(af[static_cast<Eigen::Index>(d)] - brute_af(small, m, g, f, dirs[d], q)) < 1e-9);
      }
    }
  }

  SUBCASE("errors") {
    StateMap wrong = StateMap::Zero(3, 3);
    const Direction d[] = {{0.0, 0.0}};
    CHECK_THROWS_AS(array_factor(a, wrong, g, f, d), std::invalid_argument);
    StateMap big = StateMap::Constant(a.cells_y(), a.cells_x(), 8);
    CHECK_THROWS_AS(array_factor(a, big, g, f, d), std::invalid_argument);
  }
}

TEST_CASE("pattern symmetries (property)") {
  std::mt19937 rng(8);
  const double f = 3.6e9;
  auto a = build_array(2, 2, 1);
  const auto g = ideal_gammas(1);  // real: +1, -1
  const auto cut = theta_cut(0.0, 80.0, 4.0);
  std::vector<Direction> mirrored;
  for (auto d : cut) mirrored.push_back({-d.theta_deg, d.phi_deg});

  for (int trial = 0; trial < 30; ++trial) {
    std::bernoulli_distribution bit(0.5);
    StateMap m(a.cells_y(), a.cells_x());
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) m(r, c) = bit(rng);
    }
    // Real weights: theta -> -theta conjugates the factor.
    auto fwd = array_factor(a, m, g, f, cut);
    auto back = array_factor(a, m, g, f, mirrored);
    CHECK((fwd - back.conjugate()).cwiseAbs().maxCoeff() < 1e-9);

    // Map mirrored in x: |AF| symmetric about broadside in the phi = 0 cut.
    StateMap sym = m;
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols() / 2; ++c) sym(r, m.cols() - 1 - c) = sym(r, c);
    }
    Eigen::VectorXcd g3 = ideal_gammas(3).head(2);
    g3[1] = polar_deg(0.8, 45.0);
    auto s1 = array_factor(a, sym, g3, f, cut);
    auto s2 = array_factor(a, sym, g3, f, mirrored);
    CHECK((s1.cwiseAbs() - s2.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("power_consumption") {
  CHECK(power_consumption(build_array(6, 6, 1)) == 7.2e-3);
  CHECK(power_consumption(build_array(1, 1, 3)) == 2.2e-3);
  for (int n = 1; n <= 10; ++n) {
    CHECK(power_consumption(build_array(n, 1, 1)) == doctest::Approx(n * 200e-6).epsilon(1e-12));
    CHECK(power_consumption(build_array(n, 2, 3)) == doctest::Approx(2 * n * 2200e-6).epsilon(1e-12));
  }
}

TEST_CASE("led_color") {
  CHECK(led_color(0, 3) == "black");
  CHECK(led_color(1, 3) == "cyan");
  CHECK(led_color(5, 3) == "yellow");
  CHECK(led_color(7, 3) == "white");
  CHECK(led_color(0, 1) == "black");
  CHECK(led_color(1, 1) == "green");
  CHECK(led_color(4, 3) == led_color(1, 1));
  CHECK_THROWS_AS(led_color(8, 3), std::invalid_argument);
  CHECK_THROWS_AS(led_color(2, 1), std::invalid_argument);
}

TEST_CASE("serialization") {
  auto a = build_array(1, 1, 1);
  StateMap m = StateMap::Zero(4, 4);
  m(0, 3) = 1;
  const std::string text = state_map_to_text(m);
  CHECK(text.rfind("0 0 0 1\n0 0 0 0\n", 0) == 0);
  auto j = nlohmann::json::parse(state_map_to_json(a, m));
  CHECK(j["states"][0][3] == 1);
  CHECK(j["tiles_x"] == 1);

  const Direction d[] = {{-1.5, 0.0}, {0.0, 0.0}};
  Eigen::Vector2d db(-3.0, 0.0);
  CHECK(pattern_to_csv(d, db) == "theta_deg,phi_deg,af_db\n-1.5,0,-3\n0,0,0\n");
}
