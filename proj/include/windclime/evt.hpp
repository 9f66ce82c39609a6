#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "windclime/features.hpp"
#include "windclime/ingest.hpp"
#include "windclime/storms.hpp"

namespace windclime::evt {

inline constexpr double kDefaultThresholdMs = 12.0;

/// Per-type extreme sample: one maximum speed per independent storm.
struct TypeSamples {
  std::vector<double> maxima;   // m/s, each > threshold for POT types
  double annual_rate = 0.0;     // events per year, count / record_years
  double threshold = kDefaultThresholdMs;
};

/// Storm maxima bucketed by class label. Types without storms are absent.
std::map<features::Label, TypeSamples> build_type_samples(
    std::span<const storms::StormSegment> storms,
    std::span<const features::Label> labels, const ingest::StationMeta& station,
    double threshold = kDefaultThresholdMs);

struct GumbelFit {
  double location = 0.0;  // mu, m/s
  double scale = 1.0;     // beta, m/s, > 0

  double cdf(double v) const;
  double quantile(double p) const;  // inverse CDF on (0, 1)
};

struct GpdFit {
  double shape = 0.0;      // xi
  double scale = 1.0;      // sigma, m/s, > 0
  double threshold = 0.0;  // u

  /// Event-level CDF of the speed itself: 0 below u, excess law above.
  double cdf(double v) const;
};

/**
 * Maximum-likelihood Gumbel fit, initialized from moments
 * (beta0 = s*sqrt(6)/pi, mu0 = mean - 0.5772*beta0) and accepted when the
 * log-likelihood gradient norm drops below 1e-8. Needs >= 10 samples; equal
 * samples or non-convergence raise ValidationError / NumericError.
 */
GumbelFit fit_gumbel(std::span<const double> samples);

/**
 * Maximum-likelihood GPD fit over the excesses (v - threshold) by profile
 * likelihood, with a probability-weighted-moments fallback when the MLE is
 * unusable. The shape is clamped to [-0.5, 0.5]; a note lands in `warnings`
 * when that happens. Needs >= 20 samples, all >= threshold, not all equal to
 * it.
 */
GpdFit fit_gpd(std::span<const double> samples, double threshold,
               std::vector<std::string>* warnings = nullptr);

/// Design speed with return period `t_years` for a type occurring
/// `annual_rate` times per year: solves F_event(V) = 1 - 1/(T*N). Throws
/// ValidationError when T*N <= 1.
double return_level(const GumbelFit& fit, double annual_rate, double t_years);
double return_level(const GpdFit& fit, double annual_rate, double t_years);

/// One fitted wind-type law plus its event rate.
struct EventDistribution {
  std::variant<GumbelFit, GpdFit> law;
  double annual_rate = 0.0;

  double event_cdf(double v) const;
  /// Poisson annualization: exp(-N * (1 - F_event(v))).
  double annual_cdf(double v) const;
};

/**
 * Product-of-annual-CDFs model for the yearly maximum over independent wind
 * types. `return_level` inverts 1 - prod F_ann(V) = 1/T by bisection on
 * [bracket_lo, bracket_hi] to |dV| < 1e-4 m/s; it returns nullopt when the
 * solution falls below the bracket (return period shorter than the POT model
 * resolves) and throws NumericError when even bracket_hi cannot reach the
 * target.
 */
struct MixtureModel {
  std::vector<EventDistribution> components;

  double annual_cdf(double v) const;
  std::optional<double> return_level(double t_years, double bracket_lo,
                                     double bracket_hi = 200.0) const;
};

/// 30 log-spaced return periods over [1, 1000] years.
std::vector<double> default_period_grid();
std::vector<double> log_spaced_grid(double t_min, double t_max, int points);

/// Wind speed per return period for each curve family; empty cells where a
/// curve is inapplicable (missing type, T*N <= 1, or sub-threshold mixture).
struct ReturnCurve {
  std::vector<double> period_years;
  std::vector<std::optional<double>> monsoon;
  std::vector<std::optional<double>> typhoon;
  std::vector<std::optional<double>> other;
  std::vector<std::optional<double>> commingled;
  std::vector<std::optional<double>> mixture;
};

/// Year -> maximum observed speed for calendar years where at least
/// `min_valid_fraction` of the 3-hour slots carry a speed.
std::map<int, double> annual_maxima(std::span<const ingest::MetRecord> records,
                                    double min_valid_fraction = 0.5);

/// Mixture column over the grid from per-type fitted components.
std::vector<std::optional<double>> mixture_curve(const MixtureModel& mixture,
                                                 std::span<const double> period_grid,
                                                 double bracket_lo);

}  // namespace windclime::evt
