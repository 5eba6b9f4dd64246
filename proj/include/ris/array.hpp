#ifndef RIS_ARRAY_HPP
#define RIS_ARRAY_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ris/common.hpp"

namespace ris {

/// Wall of 4x4-cell tiles on a regular, centered grid.
struct ArrayLayout {
  static constexpr int kCellsPerTileSide = 4;

  int tiles_x = 1;
  int tiles_y = 1;
  int resolution_bits = 1;
  double pitch_x_m = 0.060;
  double pitch_y_m = 0.045;

  int cells_x() const { return tiles_x * kCellsPerTileSide; }
  int cells_y() const { return tiles_y * kCellsPerTileSide; }
  int cell_count() const { return cells_x() * cells_y(); }
  int tile_count() const { return tiles_x * tiles_y; }
  int state_count() const { return 1 << resolution_bits; }
  double width_m() const { return cells_x() * pitch_x_m; }
  double height_m() const { return cells_y() * pitch_y_m; }
  double area_m2() const { return width_m() * height_m(); }

  /// Cell-center coordinates, x = (col + 1/2 - Nx/2) * pitch_x.
  Eigen::ArrayXd column_positions() const;
  Eigen::ArrayXd row_positions() const;
};

/// Per-cell state index; rows follow row_positions(), columns
/// column_positions().
using StateMap = Eigen::MatrixXi;

struct Direction {
  double theta_deg = 0.0;  // from broadside
  double phi_deg = 0.0;    // azimuth
};

struct Codebook {
  StateMap states;
  Eigen::MatrixXd residual_deg;
};

ArrayLayout build_array(int tiles_x, int tiles_y, int resolution_bits);

/// Quantizes the linear steering phase for `direction` to the nearest
/// available state phase (lowest index on ties), assuming normal incidence.
Codebook steering_codebook(const ArrayLayout& layout, const Eigen::Ref<const Eigen::VectorXcd>& state_gammas,
                           Direction direction, double frequency_hz);

/// Sum over cells of gamma_state * exp(+jk (x sin t cos p + y sin t sin p)),
/// times cos^q(theta).
Eigen::VectorXcd array_factor(const ArrayLayout& layout, const StateMap& states,
                              const Eigen::Ref<const Eigen::VectorXcd>& state_gammas, double frequency_hz,
                              std::span<const Direction> directions, double element_exponent = 1.0);

/// 20 log10(|af| / max |af|); entries with zero amplitude map to -300 dB.
Eigen::VectorXd normalized_db(const Eigen::Ref<const Eigen::VectorXcd>& af);

/// Switching-circuit power in watts (microcontroller and LEDs excluded).
double power_consumption(const ArrayLayout& layout);

std::string_view led_color(int state, int resolution_bits);

std::string state_map_to_text(const StateMap& states);
std::string state_map_to_json(const ArrayLayout& layout, const StateMap& states);
std::string pattern_to_csv(std::span<const Direction> directions, const Eigen::Ref<const Eigen::VectorXd>& af_db);

}  // namespace ris

#endif  // RIS_ARRAY_HPP
