#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windclime/terrain.hpp"

namespace windclime::ingest {

/// One station observation on the 3-hour grid. Absent fields are reported but
/// unusable values (sentinels, gaps).
struct MetRecord {
  std::int64_t time = 0;  // UTC seconds
  std::optional<double> wind_dir_deg;
  std::optional<double> wind_speed_ms;
  std::optional<double> pressure_hpa;
  std::optional<double> temp_c;
  std::optional<double> precip_mm;

  bool operator==(const MetRecord&) const = default;

  bool has_any_data() const {
    return wind_dir_deg || wind_speed_ms || pressure_hpa || temp_c || precip_mm;
  }
};

struct StationMeta {
  std::string station_id;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double record_years = 0.0;  // years of valid data, > 0
  terrain::RoughnessTable roughness;

  void validate() const;  // throws ConfigError on bad ranges
};

/**
 * Decodes ISD-Lite text: per line 12 whitespace-separated integers
 * (year month day hour temp*10 dewpoint*10 slp*10 winddir windspeed*10
 * skycode precip1h*10 precip6h*10), -9999 meaning missing. Dew point and sky
 * code are dropped; precipitation prefers the 6-hour field over the 1-hour
 * one. Throws ParseError with the line number on malformed lines and
 * ValidationError when timestamps are not strictly increasing.
 */
std::vector<MetRecord> parse_isd_lite(std::istream& in);
std::vector<MetRecord> parse_isd_lite(const std::string& text);

/// Reads the canonical CSV schema
/// `timestamp,wind_dir_deg,wind_speed_ms,pressure_hpa,temp_c,precip_mm`
/// with empty cells for missing values.
std::vector<MetRecord> parse_canonical_csv(std::istream& in);

void write_canonical_csv(std::ostream& out, std::span<const MetRecord> records);

/**
 * Quality control: collapses duplicate timestamps (first wins), voids
 * out-of-range fields (speed > 120 m/s or negative, pressure outside
 * [800, 1100] hPa, direction outside [0, 360], negative precipitation),
 * down-samples to the 3-hour grid keeping the record with the highest speed
 * per bin, and inserts all-missing gap markers so the output is contiguous.
 * Total and idempotent.
 */
std::vector<MetRecord> quality_filter(std::vector<MetRecord> records);

}  // namespace windclime::ingest
