#include "windclime/terrain.hpp"

#include <cmath>

#include "windclime/error.hpp"

namespace windclime::terrain {

namespace {

// The 120-degree factor 1.903 for Dachen Island is reproduced verbatim from
// the source table even though it is far from its neighbors; see README.
constexpr std::array<double, 12> kDachenIsland = {
    1.029, 1.093, 1.052, 1.903, 1.035, 1.024, 1.012, 1.018, 0.943, 1.035, 1.087, 1.058};

// Dinghai and Shengzhou ship with identical factors, as published.
constexpr std::array<double, 12> kDinghai = {
    0.895, 0.950, 0.915, 0.905, 0.900, 0.890, 0.880, 0.885, 0.820, 0.900, 0.945, 0.920};

}  // namespace

RoughnessTable::RoughnessTable() { factors_.fill(1.0); }

RoughnessTable::RoughnessTable(const std::map<int, double>& sector_factors) {
  if (sector_factors.size() != kSectorCount) {
    throw ConfigError("roughness table needs exactly 12 sectors, got " +
                      std::to_string(sector_factors.size()));
  }
  for (int i = 0; i < kSectorCount; ++i) {
    const int edge = (i + 1) * kSectorWidthDeg;
    const auto it = sector_factors.find(edge);
    if (it == sector_factors.end()) {
      throw ConfigError("roughness table missing sector " + std::to_string(edge));
    }
    if (!(it->second > 0.3 && it->second < 3.0)) {
      throw ConfigError("roughness factor for sector " + std::to_string(edge) +
                        " out of range (0.3, 3.0)");
    }
    factors_[static_cast<std::size_t>(i)] = it->second;
  }
}

double RoughnessTable::factor_for(double direction_deg) const {
  if (!(direction_deg >= 0.0 && direction_deg <= 360.0)) {
    throw ValidationError("wind direction " + std::to_string(direction_deg) +
                          " outside [0, 360]");
  }
  // Sector = smallest upper edge >= direction; 0 degrees joins the 360 sector.
  if (direction_deg == 0.0) {
    return factors_[kSectorCount - 1];
  }
  int idx = static_cast<int>(std::ceil(direction_deg / kSectorWidthDeg)) - 1;
  if (idx < 0) idx = 0;
  if (idx >= kSectorCount) idx = kSectorCount - 1;
  return factors_[static_cast<std::size_t>(idx)];
}

double RoughnessTable::factor_at_edge(int upper_edge_deg) const {
  const int idx = upper_edge_deg / kSectorWidthDeg - 1;
  if (upper_edge_deg % kSectorWidthDeg != 0 || idx < 0 || idx >= kSectorCount) {
    throw ConfigError("no roughness sector with upper edge " +
                      std::to_string(upper_edge_deg));
  }
  return factors_[static_cast<std::size_t>(idx)];
}

RoughnessTable RoughnessTable::preset(std::string_view name) {
  RoughnessTable table;
  if (name == "unit") {
    return table;
  }
  if (name == "dachen-island") {
    table.factors_ = kDachenIsland;
    return table;
  }
  if (name == "dinghai" || name == "shengzhou") {
    table.factors_ = kDinghai;
    return table;
  }
  throw ConfigError("unknown roughness preset '" + std::string(name) + "'");
}

double correct_wind_speed(double speed_ms, std::optional<double> direction_deg,
                          const RoughnessTable& table) {
  if (!(speed_ms >= 0.0)) {
    throw ValidationError("wind speed must be >= 0");
  }
  if (!direction_deg) {
    return speed_ms;
  }
  return speed_ms * table.factor_for(*direction_deg);
}

}  // namespace windclime::terrain
