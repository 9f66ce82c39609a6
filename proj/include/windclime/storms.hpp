#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "windclime/ingest.hpp"

namespace windclime::storms {

inline constexpr double kDefaultThresholdMs = 12.0;
inline constexpr int kDefaultSpanHours = 96;

struct SegmentationConfig {
  double p0 = 0.7;        // significance threshold in (0, 1)
  int l0 = 8;             // minimum segment length in points, >= 2
  double epsilon = 1e-9;  // pooled-standard-error guard, m/s

  void validate() const;  // throws ConfigError
};

/**
 * A 96-hour slice of the record (33 three-hourly slots) centered on an
 * independent peak. Slots outside the record or without observations are
 * all-missing gap records; the peak always sits at the center slot.
 */
struct CandidateWindow {
  static constexpr int kCenterIndex = 16;

  std::vector<ingest::MetRecord> records;  // span_hours/3 + 1 slots
  std::int64_t peak_time = 0;
  double peak_speed = 0.0;
};

/// Contiguous sub-series of a window containing its central peak.
struct StormSegment {
  std::vector<ingest::MetRecord> records;
  std::int64_t start_time = 0;  // first slot with a speed observation
  std::int64_t end_time = 0;    // last slot with a speed observation
  std::int64_t peak_time = 0;
  double peak_speed = 0.0;

  /// Slots carrying a speed observation.
  int observation_count() const;
};

/**
 * Greedy independent-peak selection: peaks above `threshold_ms` are visited
 * in descending speed order and accepted only when at least `span_hours`
 * away from every previously accepted peak, so selected peaks are pairwise
 * >= span_hours apart. Each accepted peak yields one window; windows
 * truncated by the record boundary are kept when at least 17 of their slots
 * fall inside the record.
 *
 * Records must be on the 3-hour grid (gap markers allowed).
 */
std::vector<CandidateWindow> extract_candidate_windows(
    std::span<const ingest::MetRecord> records, double threshold_ms = kDefaultThresholdMs,
    int span_hours = kDefaultSpanHours);

struct SplitResult {
  int index = 0;      // cut position: left part is [0, index), right is [index, n)
  double t_max = 0.0;
};

/**
 * Maximum mean-difference statistic over all admissible cuts. For a cut at i,
 * t(i) = |mean_left - mean_right| / s_D where s_D is the pooled standard
 * error built from sample variances (n-1 denominators). A cut is admissible
 * when both sides keep at least l0 non-missing points; NaN entries are
 * excluded from the statistics but hold their time position. Ties go to the
 * smallest index; s_D is floored at `epsilon`. Throws ValidationError when no
 * cut is admissible.
 */
SplitResult bg_split_statistic(std::span<const double> series, int l0,
                               double epsilon = 1e-9);

/**
 * Probability that a series of n points with no change point produces a
 * maximum statistic below t_max; large values mean a significant split.
 * Monotone nondecreasing in t_max, clamped to [0, 1].
 */
double bg_split_significance(double t_max, int n);

/**
 * Recursive segmentation: splits at the maximum statistic whenever its
 * significance reaches config.p0 and both parts keep at least l0 points, then
 * recurses into both parts. Returns sorted interior cut indices. NaN entries
 * count as missing.
 */
std::vector<int> bg_segment(std::span<const double> series,
                            const SegmentationConfig& config);

/// The sub-segment between adjacent boundaries (or window edges) that
/// contains the central peak, with all channels carried along.
StormSegment finalize_storm(const CandidateWindow& window,
                            std::span<const int> boundaries);

/// Convenience: windows -> BG segmentation on the speed channel -> storms.
std::vector<StormSegment> segment_storms(std::span<const ingest::MetRecord> records,
                                         double threshold_ms,
                                         const SegmentationConfig& config,
                                         int span_hours = kDefaultSpanHours);

}  // namespace windclime::storms
