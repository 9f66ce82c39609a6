#include "windclime/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "windclime/csvio.hpp"
#include "windclime/error.hpp"
#include "windclime/timeutil.hpp"

namespace windclime::ingest {

namespace {

constexpr int kMissingSentinel = -9999;
constexpr double kMaxPlausibleSpeed = 120.0;  // m/s
constexpr double kMinPlausiblePressure = 800.0;
constexpr double kMaxPlausiblePressure = 1100.0;

long parse_int_token(const std::string& token, std::size_t line_no) {
  long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("non-integer token '" + token + "'", line_no);
  }
  return value;
}

std::optional<double> scaled(long raw, double scale) {
  if (raw == kMissingSentinel) {
    return std::nullopt;
  }
  return static_cast<double>(raw) / scale;
}

}  // namespace

void StationMeta::validate() const {
  if (station_id.empty()) {
    throw ConfigError("station id is empty");
  }
  if (!(record_years > 0.0)) {
    throw ConfigError("record_years must be > 0");
  }
  if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0)) {
    throw ConfigError("latitude outside [-90, 90]");
  }
  if (!(longitude_deg >= -180.0 && longitude_deg <= 180.0)) {
    throw ConfigError("longitude outside [-180, 180]");
  }
}

std::vector<MetRecord> parse_isd_lite(std::istream& in) {
  std::vector<MetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (fields >> token) {
      tokens.push_back(token);
    }
    if (tokens.empty()) {
      continue;
    }
    if (tokens.size() != 12) {
      throw ParseError("expected 12 fields, got " + std::to_string(tokens.size()),
                       line_no);
    }
    long raw[12];
    for (std::size_t i = 0; i < 12; ++i) {
      raw[i] = parse_int_token(tokens[i], line_no);
    }

    MetRecord rec;
    rec.time = make_time(static_cast<int>(raw[0]), static_cast<int>(raw[1]),
                         static_cast<int>(raw[2]), static_cast<int>(raw[3]));
    rec.temp_c = scaled(raw[4], 10.0);
    // raw[5] is the dew point: not carried.
    rec.pressure_hpa = scaled(raw[6], 10.0);
    rec.wind_dir_deg = scaled(raw[7], 1.0);
    rec.wind_speed_ms = scaled(raw[8], 10.0);
    // raw[9] is the sky condition code: not carried.
    const auto precip_1h = scaled(raw[10], 10.0);
    const auto precip_6h = scaled(raw[11], 10.0);
    rec.precip_mm = precip_6h ? precip_6h : precip_1h;

    if (!records.empty() && rec.time <= records.back().time) {
      throw ValidationError("timestamps not strictly increasing at line " +
                            std::to_string(line_no));
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<MetRecord> parse_isd_lite(const std::string& text) {
  std::istringstream in(text);
  return parse_isd_lite(in);
}

std::vector<MetRecord> parse_canonical_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const std::size_t c_time = table.column("timestamp");
  const std::size_t c_dir = table.column("wind_dir_deg");
  const std::size_t c_speed = table.column("wind_speed_ms");
  const std::size_t c_pres = table.column("pressure_hpa");
  const std::size_t c_temp = table.column("temp_c");
  const std::size_t c_precip = table.column("precip_mm");

  std::vector<MetRecord> records;
  records.reserve(table.rows.size());
  std::size_t line_no = 1;
  for (const auto& row : table.rows) {
    ++line_no;
    MetRecord rec;
    rec.time = parse_iso8601(row[c_time]);
    rec.wind_dir_deg = csv::parse_optional(row[c_dir], line_no);
    rec.wind_speed_ms = csv::parse_optional(row[c_speed], line_no);
    rec.pressure_hpa = csv::parse_optional(row[c_pres], line_no);
    rec.temp_c = csv::parse_optional(row[c_temp], line_no);
    rec.precip_mm = csv::parse_optional(row[c_precip], line_no);
    if (!records.empty() && rec.time <= records.back().time) {
      throw ValidationError("timestamps not strictly increasing at line " +
                            std::to_string(line_no));
    }
    records.push_back(rec);
  }
  return records;
}

void write_canonical_csv(std::ostream& out, std::span<const MetRecord> records) {
  out << "timestamp,wind_dir_deg,wind_speed_ms,pressure_hpa,temp_c,precip_mm\n";
  for (const MetRecord& rec : records) {
    csv::write_row(out, {format_iso8601(rec.time), csv::format_optional(rec.wind_dir_deg),
                         csv::format_optional(rec.wind_speed_ms),
                         csv::format_optional(rec.pressure_hpa),
                         csv::format_optional(rec.temp_c),
                         csv::format_optional(rec.precip_mm)});
  }
}

namespace {

void void_out_of_range_fields(MetRecord& rec) {
  if (rec.wind_speed_ms && (*rec.wind_speed_ms < 0.0 || *rec.wind_speed_ms > kMaxPlausibleSpeed)) {
    rec.wind_speed_ms.reset();
  }
  if (rec.pressure_hpa &&
      (*rec.pressure_hpa < kMinPlausiblePressure || *rec.pressure_hpa > kMaxPlausiblePressure)) {
    rec.pressure_hpa.reset();
  }
  if (rec.wind_dir_deg && (*rec.wind_dir_deg < 0.0 || *rec.wind_dir_deg > 360.0)) {
    rec.wind_dir_deg.reset();
  }
  if (rec.precip_mm && *rec.precip_mm < 0.0) {
    rec.precip_mm.reset();
  }
}

std::int64_t grid_bin(std::int64_t t) {
  std::int64_t bin = t / kGridStepSeconds;
  if (t < 0 && t % kGridStepSeconds != 0) {
    --bin;
  }
  return bin;
}

}  // namespace

std::vector<MetRecord> quality_filter(std::vector<MetRecord> records) {
  if (records.empty()) {
    return records;
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const MetRecord& a, const MetRecord& b) { return a.time < b.time; });
  // Duplicate timestamps: first record wins.
  records.erase(std::unique(records.begin(), records.end(),
                            [](const MetRecord& a, const MetRecord& b) {
                              return a.time == b.time;
                            }),
                records.end());
  for (MetRecord& rec : records) {
    void_out_of_range_fields(rec);
  }

  // Down-sample to the 3-hour grid: keep the record with the highest wind
  // speed in each bin (ties and all-missing bins fall back to the first).
  std::vector<MetRecord> binned;
  std::size_t i = 0;
  while (i < records.size()) {
    const std::int64_t bin = grid_bin(records[i].time);
    std::size_t best = i;
    std::size_t j = i;
    while (j < records.size() && grid_bin(records[j].time) == bin) {
      const double best_speed =
          records[best].wind_speed_ms ? *records[best].wind_speed_ms : -1.0;
      const double speed = records[j].wind_speed_ms ? *records[j].wind_speed_ms : -1.0;
      if (speed > best_speed) {
        best = j;
      }
      ++j;
    }
    MetRecord rec = records[best];
    rec.time = bin * kGridStepSeconds;
    binned.push_back(rec);
    i = j;
  }

  // Explicit gap markers on every missing grid slot.
  std::vector<MetRecord> out;
  out.reserve(binned.size());
  for (std::size_t k = 0; k < binned.size(); ++k) {
    if (k > 0) {
      for (std::int64_t t = binned[k - 1].time + kGridStepSeconds; t < binned[k].time;
           t += kGridStepSeconds) {
        out.push_back(MetRecord{.time = t});
      }
    }
    out.push_back(binned[k]);
  }
  return out;
}

}  // namespace windclime::ingest
