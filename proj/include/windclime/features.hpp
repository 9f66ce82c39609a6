#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "windclime/ingest.hpp"
#include "windclime/storms.hpp"

namespace windclime::features {

/// Wind-hazard classes, in canonical order (ties and reports follow it).
enum class Label { typhoon = 0, monsoon = 1, other = 2 };

inline constexpr int kLabelCount = 3;

std::string to_string(Label label);
Label parse_label(const std::string& text);  // throws ParseError

struct StormLabel {
  std::string storm_id;
  Label label = Label::other;
};

/// Eight summary statistics of one series, population moments throughout.
struct FeatureStats {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;  // m3 / m2^1.5, 0 when m2 = 0
  double kurtosis = 0.0;  // excess: m4 / m2^2 - 3, 0 when m2 = 0
  double max = 0.0;
  double min = 0.0;
  double range = 0.0;
  double median = 0.0;  // midpoint-averaged order statistic
};

/// Throws ValidationError on empty input. NaN entries are not allowed here;
/// callers drop missing values first.
FeatureStats series_stats(std::span<const double> values);

inline constexpr int kChannelCount = 5;   // speed, direction, pressure, temperature, precipitation
inline constexpr int kStatCount = 8;
inline constexpr int kFeatureCount = 2 * kChannelCount * kStatCount + 2;  // 82

/// Column names f01..f82, matching the featurize_storm layout.
std::vector<std::string> feature_names();

/**
 * 82-entry descriptor of a storm: 8 stats per channel on the raw values
 * (entries 1-40), the same on consecutive first differences (41-80), then the
 * peak month and station latitude (81-82). Missing values are dropped per
 * channel before the statistics; a channel with fewer than one (raw) or two
 * (differences) observations contributes zeros and a warning. Throws
 * ValidationError when the storm has fewer than 2 speed observations.
 */
std::vector<double> featurize_storm(const storms::StormSegment& storm,
                                    const ingest::StationMeta& station,
                                    std::vector<std::string>* warnings = nullptr);

struct TyphoonTrackPoint {
  std::string typhoon_id;
  std::int64_t time = 0;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
};

double great_circle_km(double lat1_deg, double lon1_deg, double lat2_deg,
                       double lon2_deg);

/// True iff some track point lies within radius_km of the station and inside
/// the storm's [start, end] interval.
bool label_by_track(const storms::StormSegment& storm,
                    std::span<const TyphoonTrackPoint> track,
                    const ingest::StationMeta& station, double radius_km = 500.0);

/// Track DB CSV: `typhoon_id,timestamp,lat,lon`, chronological per typhoon.
std::vector<TyphoonTrackPoint> parse_track_csv(std::istream& in);

}  // namespace windclime::features
