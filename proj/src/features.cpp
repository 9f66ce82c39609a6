#include "windclime/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>

#include "windclime/csvio.hpp"
#include "windclime/error.hpp"
#include "windclime/timeutil.hpp"

namespace windclime::features {

std::string to_string(Label label) {
  switch (label) {
    case Label::typhoon: return "typhoon";
    case Label::monsoon: return "monsoon";
    case Label::other: return "other";
  }
  throw ValidationError("invalid label value");
}

Label parse_label(const std::string& text) {
  if (text == "typhoon") return Label::typhoon;
  if (text == "monsoon") return Label::monsoon;
  if (text == "other") return Label::other;
  throw ParseError("unknown label '" + text + "'");
}

FeatureStats series_stats(std::span<const double> values) {
  if (values.empty()) {
    throw ValidationError("series_stats on empty series");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  FeatureStats stats;
  stats.mean = mean;
  stats.stddev = std::sqrt(m2);
  stats.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  stats.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  stats.min = sorted.front();
  stats.max = sorted.back();
  stats.range = stats.max - stats.min;
  const std::size_t half = sorted.size() / 2;
  stats.median = sorted.size() % 2 == 1 ? sorted[half]
                                        : 0.5 * (sorted[half - 1] + sorted[half]);
  return stats;
}

std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  names.reserve(kFeatureCount);
  for (int i = 1; i <= kFeatureCount; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "f%02d", i);
    names.emplace_back(buf);
  }
  return names;
}

namespace {

std::vector<double> channel_values(const storms::StormSegment& storm, int channel) {
  std::vector<double> values;
  values.reserve(storm.records.size());
  for (const auto& rec : storm.records) {
    const std::optional<double>* field = nullptr;
    switch (channel) {
      case 0: field = &rec.wind_speed_ms; break;
      case 1: field = &rec.wind_dir_deg; break;
      case 2: field = &rec.pressure_hpa; break;
      case 3: field = &rec.temp_c; break;
      case 4: field = &rec.precip_mm; break;
      default: throw ValidationError("bad channel index");
    }
    if (field->has_value()) {
      values.push_back(field->value());
    }
  }
  return values;
}

const char* channel_name(int channel) {
  static constexpr const char* kNames[] = {"speed", "direction", "pressure",
                                           "temperature", "precipitation"};
  return kNames[channel];
}

void append_stats(std::vector<double>& out, std::span<const double> values) {
  const FeatureStats s = series_stats(values);
  out.insert(out.end(),
             {s.mean, s.stddev, s.skewness, s.kurtosis, s.max, s.min, s.range, s.median});
}

void append_zero_stats(std::vector<double>& out) {
  out.insert(out.end(), kStatCount, 0.0);
}

}  // namespace

std::vector<double> featurize_storm(const storms::StormSegment& storm,
                                    const ingest::StationMeta& station,
                                    std::vector<std::string>* warnings) {
  if (storm.observation_count() < 2) {
    throw ValidationError("storm needs at least 2 speed observations to featurize");
  }
  std::vector<double> out;
  out.reserve(kFeatureCount);

  std::vector<std::vector<double>> channels(kChannelCount);
  for (int c = 0; c < kChannelCount; ++c) {
    channels[c] = channel_values(storm, c);
    if (channels[c].empty() && warnings != nullptr) {
      warnings->push_back(std::string("channel ") + channel_name(c) +
                          " fully missing; contributing zeros");
    }
  }

  // First-order block: stats of the raw series per channel.
  for (int c = 0; c < kChannelCount; ++c) {
    if (channels[c].empty()) {
      append_zero_stats(out);
    } else {
      append_stats(out, channels[c]);
    }
  }
  // Second-order block: stats of consecutive differences per channel.
  for (int c = 0; c < kChannelCount; ++c) {
    const auto& values = channels[c];
    if (values.size() < 2) {
      append_zero_stats(out);
      continue;
    }
    std::vector<double> diffs(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) {
      diffs[i - 1] = values[i] - values[i - 1];
    }
    append_stats(out, diffs);
  }
  // Environment block.
  out.push_back(static_cast<double>(month_of(storm.peak_time)));
  out.push_back(station.latitude_deg);
  return out;
}

double great_circle_km(double lat1_deg, double lon1_deg, double lat2_deg,
                       double lon2_deg) {
  constexpr double kEarthRadiusKm = 6371.0;
  constexpr double kDegToRad = M_PI / 180.0;
  const double lat1 = lat1_deg * kDegToRad;
  const double lat2 = lat2_deg * kDegToRad;
  const double dlat = (lat2_deg - lat1_deg) * kDegToRad;
  const double dlon = (lon2_deg - lon1_deg) * kDegToRad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

bool label_by_track(const storms::StormSegment& storm,
                    std::span<const TyphoonTrackPoint> track,
                    const ingest::StationMeta& station, double radius_km) {
  if (!(radius_km > 0.0)) {
    throw ConfigError("track match radius must be > 0");
  }
  for (const TyphoonTrackPoint& p : track) {
    if (p.time < storm.start_time || p.time > storm.end_time) {
      continue;
    }
    if (great_circle_km(p.latitude_deg, p.longitude_deg, station.latitude_deg,
                        station.longitude_deg) <= radius_km) {
      return true;
    }
  }
  return false;
}

std::vector<TyphoonTrackPoint> parse_track_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const std::size_t c_id = table.column("typhoon_id");
  const std::size_t c_time = table.column("timestamp");
  const std::size_t c_lat = table.column("lat");
  const std::size_t c_lon = table.column("lon");
  std::vector<TyphoonTrackPoint> points;
  points.reserve(table.rows.size());
  std::size_t line_no = 1;
  for (const auto& row : table.rows) {
    ++line_no;
    points.push_back({row[c_id], parse_iso8601(row[c_time]),
                      csv::parse_double(row[c_lat], line_no),
                      csv::parse_double(row[c_lon], line_no)});
  }
  return points;
}

}  // namespace windclime::features
