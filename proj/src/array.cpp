#include "ris/array.hpp"

#include <array>

#include <json.hpp>

#include "ris/touchstone.hpp"

namespace ris {

namespace {

// Switching-circuit draw per tile in microwatts, keyed by resolution.
constexpr long kTilePowerUw1Bit = 200;
constexpr long kTilePowerUw3Bit = 2200;

constexpr std::array<std::string_view, 8> kLedColors3Bit{"black", "cyan",   "red",  "magenta",
                                                         "green", "yellow", "blue", "white"};

Eigen::ArrayXd centered_positions(int n, double pitch) {
  return (Eigen::ArrayXd::LinSpaced(n, 0.0, n - 1.0) + 0.5 - n / 2.0) * pitch;
}

}  // namespace

Eigen::ArrayXd ArrayLayout::column_positions() const { return centered_positions(cells_x(), pitch_x_m); }
Eigen::ArrayXd ArrayLayout::row_positions() const { return centered_positions(cells_y(), pitch_y_m); }

ArrayLayout build_array(int tiles_x, int tiles_y, int resolution_bits) {
  if (tiles_x < 1 || tiles_y < 1) throw std::invalid_argument("build_array: tile counts must be >= 1");
  if (resolution_bits != 1 && resolution_bits != 3) {
    throw std::invalid_argument("build_array: resolution must be 1 or 3 bits");
  }
  ArrayLayout layout;
  layout.tiles_x = tiles_x;
  layout.tiles_y = tiles_y;
  layout.resolution_bits = resolution_bits;
  return layout;
}

Codebook steering_codebook(const ArrayLayout& layout, const Eigen::Ref<const Eigen::VectorXcd>& state_gammas,
                           Direction direction, double frequency_hz) {
  if (state_gammas.size() != layout.state_count()) {
    throw std::invalid_argument("steering_codebook: expected " + std::to_string(layout.state_count()) +
                                " state reflection coefficients");
  }
  if (!(direction.theta_deg >= 0.0 && direction.theta_deg < 90.0)) {
    throw std::invalid_argument("steering_codebook: theta must lie in [0, 90) degrees");
  }
  const double k = 2.0 * std::numbers::pi * frequency_hz / kSpeedOfLight;
  const double st = std::sin(deg_to_rad(direction.theta_deg));
  const double u = st * std::cos(deg_to_rad(direction.phi_deg));
  const double v = st * std::sin(deg_to_rad(direction.phi_deg));
  const Eigen::ArrayXd xs = layout.column_positions();
  const Eigen::ArrayXd ys = layout.row_positions();
  const Eigen::VectorXd state_phase = state_gammas.unaryExpr([](const Complex& z) { return phase_deg(z); });

  Codebook cb{StateMap(layout.cells_y(), layout.cells_x()), Eigen::MatrixXd(layout.cells_y(), layout.cells_x())};
  for (int r = 0; r < layout.cells_y(); ++r) {
    for (int c = 0; c < layout.cells_x(); ++c) {
      const double desired = wrap_360(rad_to_deg(-k * (xs[c] * u + ys[r] * v)));
      int best = 0;
      double best_d = circular_distance(desired, state_phase[0]);
      for (Eigen::Index s = 1; s < state_phase.size(); ++s) {
        const double d = circular_distance(desired, state_phase[s]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(s);
        }
      }
      cb.states(r, c) = best;
      cb.residual_deg(r, c) = best_d;
    }
  }
  return cb;
}

Eigen::VectorXcd array_factor(const ArrayLayout& layout, const StateMap& states,
                              const Eigen::Ref<const Eigen::VectorXcd>& state_gammas, double frequency_hz,
                              std::span<const Direction> directions, double element_exponent) {
  if (states.rows() != layout.cells_y() || states.cols() != layout.cells_x()) {
    throw std::invalid_argument("array_factor: state map does not match the layout");
  }
  const Eigen::Index n = layout.cell_count();
  Eigen::ArrayXd x(n), y(n);
  Eigen::ArrayXcd weight(n);
  const Eigen::ArrayXd xs = layout.column_positions();
  const Eigen::ArrayXd ys = layout.row_positions();
  Eigen::Index i = 0;
  for (int r = 0; r < layout.cells_y(); ++r) {
    for (int c = 0; c < layout.cells_x(); ++c, ++i) {
      const int s = states(r, c);
      if (s < 0 || s >= state_gammas.size()) throw std::invalid_argument("array_factor: state index out of range");
      x[i] = xs[c];
      y[i] = ys[r];
      weight[i] = state_gammas[s];
    }
  }

  const double k = 2.0 * std::numbers::pi * frequency_hz / kSpeedOfLight;
  Eigen::VectorXcd af(static_cast<Eigen::Index>(directions.size()));
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const double t = deg_to_rad(directions[d].theta_deg);
    const double p = deg_to_rad(directions[d].phi_deg);
    const Eigen::ArrayXd phase = k * std::sin(t) * (x * std::cos(p) + y * std::sin(p));
    const Complex sum = (weight * phase.unaryExpr([](double a) { return std::polar(1.0, a); })).sum();
    const double element = std::pow(std::max(std::cos(t), 0.0), element_exponent);
    af[static_cast<Eigen::Index>(d)] = element * sum;
  }
  return af;
}

Eigen::VectorXd normalized_db(const Eigen::Ref<const Eigen::VectorXcd>& af) {
  const Eigen::VectorXd mag = af.cwiseAbs();
  const double peak = mag.size() > 0 ? mag.maxCoeff() : 0.0;
  return mag.unaryExpr([peak](double m) { return m > 0.0 && peak > 0.0 ? 20.0 * std::log10(m / peak) : -300.0; });
}

double power_consumption(const ArrayLayout& layout) {
  long per_tile_uw = 0;
  switch (layout.resolution_bits) {
    case 1: per_tile_uw = kTilePowerUw1Bit; break;
    case 3: per_tile_uw = kTilePowerUw3Bit; break;
    default: throw std::invalid_argument("power_consumption: resolution must be 1 or 3 bits");
  }
  return static_cast<double>(per_tile_uw * layout.tile_count()) / 1e6;
}

std::string_view led_color(int state, int resolution_bits) {
  if (resolution_bits == 3) {
    if (state < 0 || state >= 8) throw std::invalid_argument("led_color: state out of range for 3 bits");
    return kLedColors3Bit[static_cast<std::size_t>(state)];
  }
  if (resolution_bits == 1) {
    // 0 deg and 180 deg entries of the 3-bit table.
    if (state == 0) return "black";
    if (state == 1) return "green";
    throw std::invalid_argument("led_color: state out of range for 1 bit");
  }
  throw std::invalid_argument("led_color: resolution must be 1 or 3 bits");
}

std::string state_map_to_text(const StateMap& states) {
  std::string out;
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
      if (c > 0) out += ' ';
      out += std::to_string(states(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string state_map_to_json(const ArrayLayout& layout, const StateMap& states) {
  nlohmann::ordered_json doc;
  doc["tiles_x"] = layout.tiles_x;
  doc["tiles_y"] = layout.tiles_y;
  doc["resolution_bits"] = layout.resolution_bits;
  doc["pitch_x_m"] = layout.pitch_x_m;
  doc["pitch_y_m"] = layout.pitch_y_m;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    std::vector<int> row(static_cast<std::size_t>(states.cols()));
    for (Eigen::Index c = 0; c < states.cols(); ++c) row[static_cast<std::size_t>(c)] = states(r, c);
    rows.push_back(row);
  }
  doc["states"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string pattern_to_csv(std::span<const Direction> directions, const Eigen::Ref<const Eigen::VectorXd>& af_db) {
  std::string out = "theta_deg,phi_deg,af_db\n";
  for (std::size_t d = 0; d < directions.size(); ++d) {
    out += format_double(directions[d].theta_deg) + "," + format_double(directions[d].phi_deg) + "," +
           format_double(af_db[static_cast<Eigen::Index>(d)]) + "\n";
  }
  return out;
}

}  // namespace ris
