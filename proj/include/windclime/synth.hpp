#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "windclime/features.hpp"
#include "windclime/ingest.hpp"

namespace windclime::synth {

/**
 * Recipe for a synthetic station record with planted, labeled storms. The
 * background is a quiet autoregressive process (speeds stay below 10 m/s);
 * each class adds its own deterministic signature plus channel noise, so
 * every planted peak clears the 12 m/s extraction threshold.
 */
struct SynthSpec {
  int years = 10;
  int start_year = 2000;
  int typhoons_per_year = 10;
  int monsoons_per_year = 10;
  int others_per_year = 10;

  // Typhoon: speed ramp, pressure dip, rain burst, veering direction.
  double typhoon_peak_ms = 25.0;
  double typhoon_pressure_dip_hpa = 35.0;
  double typhoon_precip_burst_mm = 18.0;
  double typhoon_dir_veer_deg = 150.0;
  // Monsoon: sustained wind from a steady direction.
  double monsoon_speed_ms = 16.0;
  double monsoon_dir_center_deg = 45.0;
  double monsoon_dir_jitter_deg = 12.0;
  // Other: short unstructured gust spike.
  double other_peak_ms = 18.0;
  int other_spike_hours = 12;

  // Per-channel Gaussian noise levels.
  double noise_speed_ms = 0.4;
  double noise_dir_deg = 6.0;
  double noise_pressure_hpa = 1.0;
  double noise_temp_c = 0.8;
  double noise_precip_mm = 0.05;

  void validate() const;  // peaks must exceed 12 m/s, counts fit the spacing
};

struct PlantedStorm {
  std::string id;
  features::Label label = features::Label::other;
  std::int64_t start_time = 0;
  std::int64_t end_time = 0;
  std::int64_t peak_time = 0;
};

struct SynthResult {
  std::vector<ingest::MetRecord> records;
  std::vector<PlantedStorm> truth;
};

/// Deterministic in (spec, seed); planted peaks are at least 120 h apart.
SynthResult generate_synthetic_station(const SynthSpec& spec, std::uint64_t seed);

}  // namespace windclime::synth
