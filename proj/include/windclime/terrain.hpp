#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace windclime::terrain {

/**
 * Per-direction multiplicative correction to a uniform exposure of 10 m over
 * open terrain (z0 = 0.03 m). Twelve 30-degree sectors, each labeled by its
 * upper edge (30, 60, ..., 360).
 */
class RoughnessTable {
 public:
  static constexpr int kSectorCount = 12;
  static constexpr int kSectorWidthDeg = 30;

  /// Identity table (factor 1.0 everywhere).
  RoughnessTable();

  /// Validates exactly 12 sectors at edges 30..360 with factors in (0.3, 3.0);
  /// throws ConfigError otherwise.
  explicit RoughnessTable(const std::map<int, double>& sector_factors);

  /// Factor for the sector containing `direction_deg` in [0, 360]; a direction
  /// of 0 maps to the 360 sector.
  double factor_for(double direction_deg) const;

  double factor_at_edge(int upper_edge_deg) const;

  const std::array<double, kSectorCount>& factors() const { return factors_; }

  /// Named station presets shipped with the library: "dachen-island",
  /// "dinghai", "shengzhou", "unit".
  static RoughnessTable preset(std::string_view name);

 private:
  std::array<double, kSectorCount> factors_;  // index i covers ((i)*30, (i+1)*30]
};

/// Transforms a recorded speed to uniform exposure. Missing direction applies
/// factor 1.0.
double correct_wind_speed(double speed_ms, std::optional<double> direction_deg,
                          const RoughnessTable& table);

}  // namespace windclime::terrain
