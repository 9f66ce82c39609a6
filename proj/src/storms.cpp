#include "windclime/storms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "windclime/error.hpp"
#include "windclime/mathx.hpp"
#include "windclime/timeutil.hpp"

namespace windclime::storms {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void SegmentationConfig::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw ConfigError("segmentation p0 must lie in (0, 1)");
  }
  if (l0 < 2) {
    throw ConfigError("segmentation l0 must be >= 2");
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("segmentation epsilon must be > 0");
  }
}

int StormSegment::observation_count() const {
  int n = 0;
  for (const auto& rec : records) {
    if (rec.wind_speed_ms) ++n;
  }
  return n;
}

std::vector<CandidateWindow> extract_candidate_windows(
    std::span<const ingest::MetRecord> records, double threshold_ms, int span_hours) {
  if (span_hours <= 0 || span_hours % 6 != 0) {
    throw ConfigError("window span must be a positive multiple of 6 hours");
  }
  std::vector<CandidateWindow> windows;
  if (records.empty()) {
    return windows;
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].time <= records[i - 1].time ||
        (records[i].time - records[i - 1].time) % kGridStepSeconds != 0) {
      throw ValidationError("records must be strictly increasing on the 3-hour grid");
    }
  }

  const int half_slots = span_hours / 6;  // 16 slots each side for 96 h
  const std::int64_t min_separation = static_cast<std::int64_t>(span_hours) * kSecondsPerHour;

  struct Peak {
    std::size_t index;
    std::int64_t time;
    double speed;
  };
  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].wind_speed_ms && *records[i].wind_speed_ms > threshold_ms) {
      peaks.push_back({i, records[i].time, *records[i].wind_speed_ms});
    }
  }
  // Greedy selection in descending speed order, earlier peak on ties.
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.speed != b.speed) return a.speed > b.speed;
    return a.time < b.time;
  });
  std::vector<Peak> selected;
  for (const Peak& p : peaks) {
    const bool suppressed =
        std::any_of(selected.begin(), selected.end(), [&](const Peak& s) {
          return std::llabs(p.time - s.time) < min_separation;
        });
    if (!suppressed) {
      selected.push_back(p);
    }
  }
  std::sort(selected.begin(), selected.end(),
            [](const Peak& a, const Peak& b) { return a.time < b.time; });

  const std::int64_t record_start = records.front().time;
  const std::int64_t record_end = records.back().time;
  for (const Peak& p : selected) {
    CandidateWindow window;
    window.peak_time = p.time;
    window.peak_speed = p.speed;
    window.records.reserve(2 * half_slots + 1);
    int in_range = 0;
    // Record index scan stays O(1) amortized: slots advance with the peak.
    std::size_t scan = p.index >= static_cast<std::size_t>(half_slots)
                           ? p.index - static_cast<std::size_t>(half_slots)
                           : 0;
    for (int slot = -half_slots; slot <= half_slots; ++slot) {
      const std::int64_t t = p.time + slot * kGridStepSeconds;
      ingest::MetRecord rec{.time = t};
      if (t >= record_start && t <= record_end) {
        ++in_range;
        while (scan < records.size() && records[scan].time < t) {
          ++scan;
        }
        if (scan < records.size() && records[scan].time == t) {
          rec = records[scan];
        }
      }
      window.records.push_back(rec);
    }
    if (in_range >= half_slots + 1) {
      windows.push_back(std::move(window));
    }
  }
  return windows;
}

SplitResult bg_split_statistic(std::span<const double> series, int l0, double epsilon) {
  if (l0 < 2) {
    throw ConfigError("bg_split_statistic requires l0 >= 2");
  }
  const int n = static_cast<int>(series.size());

  // Prefix sums over non-missing entries.
  std::vector<double> sum(n + 1, 0.0), sumsq(n + 1, 0.0);
  std::vector<int> count(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    const double v = series[i];
    const bool present = !std::isnan(v);
    sum[i + 1] = sum[i] + (present ? v : 0.0);
    sumsq[i + 1] = sumsq[i] + (present ? v * v : 0.0);
    count[i + 1] = count[i] + (present ? 1 : 0);
  }

  SplitResult best{.index = -1, .t_max = -1.0};
  for (int cut = 1; cut < n; ++cut) {
    const int n_left = count[cut];
    const int n_right = count[n] - count[cut];
    if (n_left < l0 || n_right < l0) {
      continue;
    }
    const double mean_left = sum[cut] / n_left;
    const double mean_right = (sum[n] - sum[cut]) / n_right;
    const double ss_left = sumsq[cut] - n_left * mean_left * mean_left;
    const double ss_right = (sumsq[n] - sumsq[cut]) - n_right * mean_right * mean_right;
    const double pooled_var = std::max(0.0, ss_left + ss_right) / (n_left + n_right - 2);
    const double se = std::sqrt(pooled_var * (1.0 / n_left + 1.0 / n_right));
    const double t = std::fabs(mean_left - mean_right) / std::max(se, epsilon);
    if (t > best.t_max) {
      best = {.index = cut, .t_max = t};
    }
  }
  if (best.index < 0) {
    throw ValidationError("series too short to split: no admissible cut");
  }
  return best;
}

double bg_split_significance(double t_max, int n) {
  if (n < 4) {
    throw ValidationError("bg_split_significance requires n >= 4");
  }
  if (!(t_max >= 0.0)) {
    throw ValidationError("bg_split_significance requires t_max >= 0");
  }
  const double nu = n - 2;
  constexpr double kDelta = 0.40;
  const double eta = std::max(1.0, 4.19 * std::log(static_cast<double>(n)) - 11.54);
  const double x = nu / (nu + t_max * t_max);
  const double inner = 1.0 - regularized_incomplete_beta(x, kDelta * nu, kDelta);
  const double p = std::pow(std::max(0.0, inner), eta);
  return std::clamp(p, 0.0, 1.0);
}

namespace {

void bg_segment_recurse(std::span<const double> series, int lo, int hi,
                        const SegmentationConfig& config, std::vector<int>& cuts) {
  const auto part = series.subspan(static_cast<std::size_t>(lo),
                                   static_cast<std::size_t>(hi - lo));
  int valid = 0;
  for (double v : part) {
    if (!std::isnan(v)) ++valid;
  }
  if (valid < 2 * config.l0) {
    return;
  }
  SplitResult split;
  try {
    split = bg_split_statistic(part, config.l0, config.epsilon);
  } catch (const ValidationError&) {
    return;  // no admissible cut in this part
  }
  const double significance = bg_split_significance(split.t_max, valid);
  if (significance < config.p0) {
    return;
  }
  const int cut = lo + split.index;
  cuts.push_back(cut);
  bg_segment_recurse(series, lo, cut, config, cuts);
  bg_segment_recurse(series, cut, hi, config, cuts);
}

}  // namespace

std::vector<int> bg_segment(std::span<const double> series,
                            const SegmentationConfig& config) {
  config.validate();
  std::vector<int> cuts;
  if (!series.empty()) {
    bg_segment_recurse(series, 0, static_cast<int>(series.size()), config, cuts);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

StormSegment finalize_storm(const CandidateWindow& window,
                            std::span<const int> boundaries) {
  const int n = static_cast<int>(window.records.size());
  const int center = n / 2;
  int lo = 0;
  int hi = n;
  for (int b : boundaries) {
    if (b <= center && b > lo) lo = b;
    if (b > center && b < hi) hi = b;
  }

  StormSegment storm;
  storm.peak_time = window.peak_time;
  storm.peak_speed = window.peak_speed;
  storm.records.assign(window.records.begin() + lo, window.records.begin() + hi);

  bool found = false;
  for (const auto& rec : storm.records) {
    if (!rec.wind_speed_ms) continue;
    if (!found) {
      storm.start_time = rec.time;
      found = true;
    }
    storm.end_time = rec.time;
    if (*rec.wind_speed_ms > storm.peak_speed) {
      storm.peak_speed = *rec.wind_speed_ms;
      storm.peak_time = rec.time;
    }
  }
  if (!found) {
    throw ValidationError("storm segment has no speed observations");
  }
  return storm;
}

std::vector<StormSegment> segment_storms(std::span<const ingest::MetRecord> records,
                                         double threshold_ms,
                                         const SegmentationConfig& config,
                                         int span_hours) {
  config.validate();
  std::vector<StormSegment> storms;
  for (const CandidateWindow& window :
       extract_candidate_windows(records, threshold_ms, span_hours)) {
    std::vector<double> speeds;
    speeds.reserve(window.records.size());
    for (const auto& rec : window.records) {
      speeds.push_back(rec.wind_speed_ms ? *rec.wind_speed_ms : kNan);
    }
    const std::vector<int> cuts = bg_segment(speeds, config);
    storms.push_back(finalize_storm(window, cuts));
  }
  return storms;
}

}  // namespace windclime::storms
