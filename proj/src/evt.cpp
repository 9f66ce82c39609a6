#include "windclime/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "windclime/error.hpp"
#include "windclime/mathx.hpp"
#include "windclime/timeutil.hpp"

namespace windclime::evt {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

}  // namespace

std::map<features::Label, TypeSamples> build_type_samples(
    std::span<const storms::StormSegment> storms,
    std::span<const features::Label> labels, const ingest::StationMeta& station,
    double threshold) {
  if (storms.size() != labels.size()) {
    throw ValidationError("storms/labels size mismatch");
  }
  station.validate();
  std::map<features::Label, TypeSamples> samples;
  for (std::size_t i = 0; i < storms.size(); ++i) {
    TypeSamples& bucket = samples[labels[i]];
    bucket.threshold = threshold;
    bucket.maxima.push_back(storms[i].peak_speed);
  }
  for (auto& [label, bucket] : samples) {
    bucket.annual_rate = static_cast<double>(bucket.maxima.size()) / station.record_years;
  }
  return samples;
}

double GumbelFit::cdf(double v) const {
  return std::exp(-std::exp(-(v - location) / scale));
}

double GumbelFit::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("Gumbel quantile needs p in (0, 1)");
  }
  return location - scale * std::log(-std::log(p));
}

double GpdFit::cdf(double v) const {
  if (v < threshold) {
    return 0.0;
  }
  const double y = v - threshold;
  if (std::fabs(shape) < 1e-12) {
    return 1.0 - std::exp(-y / scale);
  }
  const double inner = 1.0 + shape * y / scale;
  if (inner <= 0.0) {
    return shape < 0.0 ? 1.0 : 0.0;  // beyond the upper endpoint when xi < 0
  }
  return 1.0 - std::pow(inner, -1.0 / shape);
}

namespace {

// Gradient of the Gumbel total log-likelihood at (mu, beta).
void gumbel_gradient(std::span<const double> x, double mu, double beta, double& d_mu,
                     double& d_beta) {
  d_mu = 0.0;
  d_beta = 0.0;
  for (double v : x) {
    const double z = (v - mu) / beta;
    const double e = std::exp(-z);
    d_mu += (1.0 - e) / beta;
    d_beta += (z * (1.0 - e) - 1.0) / beta;
  }
}

// Profile equation g(beta) = beta - mean(x) + sum(x e^{-x/b}) / sum(e^{-x/b});
// increasing in beta with a single root for non-degenerate samples.
double gumbel_profile(std::span<const double> x, double beta, double x_min) {
  double wsum = 0.0, wxsum = 0.0, sum = 0.0;
  for (double v : x) {
    const double w = std::exp(-(v - x_min) / beta);
    wsum += w;
    wxsum += w * v;
    sum += v;
  }
  return beta - sum / static_cast<double>(x.size()) + wxsum / wsum;
}

}  // namespace

GumbelFit fit_gumbel(std::span<const double> samples) {
  if (samples.size() < 10) {
    throw ValidationError("fit_gumbel needs >= 10 samples");
  }
  const MeanVar mv = sample_mean_variance(samples);
  if (!(mv.variance > 0.0)) {
    throw ValidationError("fit_gumbel: degenerate sample (zero variance)");
  }
  const double x_min = *std::min_element(samples.begin(), samples.end());
  const double beta0 = std::sqrt(mv.variance) * std::sqrt(6.0) / M_PI;

  // Bracket the profile root around the moments start, then bisect.
  double lo = beta0, hi = beta0;
  int expand = 0;
  while (gumbel_profile(samples, lo, x_min) > 0.0) {
    lo *= 0.5;
    if (++expand > 200) throw NumericError("fit_gumbel: no lower bracket for beta");
  }
  expand = 0;
  while (gumbel_profile(samples, hi, x_min) < 0.0) {
    hi *= 2.0;
    if (++expand > 200) throw NumericError("fit_gumbel: no upper bracket for beta");
  }
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (gumbel_profile(samples, mid, x_min) < 0.0 ? lo : hi) = mid;
  }
  const double beta = 0.5 * (lo + hi);

  double wsum = 0.0;
  for (double v : samples) {
    wsum += std::exp(-(v - x_min) / beta);
  }
  const double mu = x_min - beta * std::log(wsum / static_cast<double>(samples.size()));

  double d_mu = 0.0, d_beta = 0.0;
  gumbel_gradient(samples, mu, beta, d_mu, d_beta);
  const double grad_norm = std::hypot(d_mu, d_beta);
  if (!(grad_norm < 1e-8)) {
    throw NumericError("fit_gumbel did not converge: |grad| = " +
                       std::to_string(grad_norm) + " after bisection on beta in [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return GumbelFit{.location = mu, .scale = beta};
}

namespace {

// Profile log-likelihood of the GPD over tau = xi/sigma; xi(tau) is the mean
// of log1p(tau*y).
double gpd_profile_loglik(std::span<const double> y, double tau) {
  const double n = static_cast<double>(y.size());
  if (tau == 0.0) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    return -n * std::log(mean) - n;
  }
  double xi = 0.0;
  for (double v : y) {
    const double inner = 1.0 + tau * v;
    if (inner <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    xi += std::log(inner);
  }
  xi /= n;
  if (xi / tau <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return -n * std::log(xi / tau) - n * (1.0 + xi);
}

// Hosking & Wallis probability-weighted moments estimator.
GpdFit gpd_pwm(std::span<const double> y, double threshold) {
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double b0 = 0.0, b1 = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    b0 += sorted[i];
    const double p = (static_cast<double>(i) + 1.0 - 0.35) / n;
    b1 += sorted[i] * (1.0 - p);
  }
  b0 /= n;
  b1 /= n;
  const double denom = b0 - 2.0 * b1;
  if (!(denom > 0.0)) {
    throw NumericError("GPD PWM estimator degenerate");
  }
  GpdFit fit;
  fit.threshold = threshold;
  fit.shape = 2.0 - b0 / denom;
  fit.scale = 2.0 * b0 * b1 / denom;
  return fit;
}

// Fixed-shape scale MLE: with xi pinned, maximize over sigma by golden
// section on log(sigma).
double gpd_scale_given_shape(std::span<const double> y, double xi) {
  double mean = 0.0, y_max = 0.0;
  for (double v : y) {
    mean += v;
    y_max = std::max(y_max, v);
  }
  mean /= static_cast<double>(y.size());
  auto neg_loglik = [&](double sigma) {
    double ll = 0.0;
    for (double v : y) {
      const double inner = 1.0 + xi * v / sigma;
      if (inner <= 0.0) {
        return std::numeric_limits<double>::infinity();
      }
      ll += -std::log(sigma) - (1.0 + 1.0 / xi) * std::log(inner);
    }
    return -ll;
  };
  // When xi < 0 the support forces sigma > -xi * y_max.
  const double sigma_floor = xi < 0.0 ? -xi * y_max * (1.0 + 1e-9) : mean * 1e-3;
  double lo = std::log(std::max(mean * 1e-3, sigma_floor));
  double hi = std::log(std::max(mean * 1e3, sigma_floor * 10.0));
  constexpr double kPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kPhi * (b - a);
  double d = a + kPhi * (b - a);
  for (int iter = 0; iter < 200 && (b - a) > 1e-12; ++iter) {
    if (neg_loglik(std::exp(c)) < neg_loglik(std::exp(d))) {
      b = d;
    } else {
      a = c;
    }
    c = b - kPhi * (b - a);
    d = a + kPhi * (b - a);
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace

GpdFit fit_gpd(std::span<const double> samples, double threshold,
               std::vector<std::string>* warnings) {
  if (samples.size() < 20) {
    throw ValidationError("fit_gpd needs >= 20 samples");
  }
  std::vector<double> y;
  y.reserve(samples.size());
  double y_max = 0.0;
  for (double v : samples) {
    if (v < threshold) {
      throw ValidationError("fit_gpd: sample below threshold");
    }
    y.push_back(v - threshold);
    y_max = std::max(y_max, v - threshold);
  }
  if (!(y_max > 0.0)) {
    throw ValidationError("fit_gpd: all excesses are zero");
  }

  GpdFit fit;
  fit.threshold = threshold;
  bool mle_ok = false;
  try {
    // Coarse profile scan over tau in (-1/y_max, inf), then golden refine.
    const double tau_min = -0.999999 / y_max;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    const double tau_max = 50.0 / mean;

    double best_tau = 0.0;
    double best_ll = gpd_profile_loglik(y, 0.0);
    constexpr int kScan = 600;
    for (int i = 0; i <= kScan; ++i) {
      const double tau = tau_min + (tau_max - tau_min) * i / kScan;
      const double ll = gpd_profile_loglik(y, tau);
      if (ll > best_ll) {
        best_ll = ll;
        best_tau = tau;
      }
    }
    const double step = (tau_max - tau_min) / kScan;
    double a = best_tau - step;
    double b = best_tau + step;
    constexpr double kPhi = 0.6180339887498949;
    double c = b - kPhi * (b - a);
    double d = a + kPhi * (b - a);
    for (int iter = 0; iter < 300 && (b - a) > 1e-13 * std::max(1.0, std::fabs(best_tau));
         ++iter) {
      if (gpd_profile_loglik(y, c) > gpd_profile_loglik(y, d)) {
        b = d;
      } else {
        a = c;
      }
      c = b - kPhi * (b - a);
      d = a + kPhi * (b - a);
    }
    const double tau = 0.5 * (a + b);
    if (std::fabs(tau) < 1e-10 / mean) {
      fit.shape = 0.0;
      fit.scale = mean;
    } else {
      double xi = 0.0;
      for (double v : y) {
        xi += std::log1p(tau * v);
      }
      xi /= static_cast<double>(y.size());
      fit.shape = xi;
      fit.scale = xi / tau;
    }
    mle_ok = std::isfinite(fit.shape) && std::isfinite(fit.scale) && fit.scale > 0.0;
  } catch (const NumericError&) {
    mle_ok = false;
  }
  if (!mle_ok) {
    if (warnings != nullptr) {
      warnings->push_back("GPD MLE failed; using probability-weighted moments");
    }
    fit = gpd_pwm(y, threshold);
  }

  if (fit.shape < -0.5 || fit.shape > 0.5) {
    if (warnings != nullptr) {
      warnings->push_back("GPD shape " + std::to_string(fit.shape) +
                          " clamped to [-0.5, 0.5]");
    }
    fit.shape = std::clamp(fit.shape, -0.5, 0.5);
    fit.scale = gpd_scale_given_shape(y, fit.shape);
  }
  return fit;
}

namespace {

double events_per_period(double annual_rate, double t_years) {
  const double tn = t_years * annual_rate;
  if (!(tn > 1.0)) {
    throw ValidationError("return period below one event interval (T*N <= 1)");
  }
  return tn;
}

}  // namespace

double return_level(const GumbelFit& fit, double annual_rate, double t_years) {
  const double tn = events_per_period(annual_rate, t_years);
  return fit.location - fit.scale * std::log(-std::log(1.0 - 1.0 / tn));
}

double return_level(const GpdFit& fit, double annual_rate, double t_years) {
  const double tn = events_per_period(annual_rate, t_years);
  if (std::fabs(fit.shape) < 1e-12) {
    return fit.threshold + fit.scale * std::log(tn);
  }
  return fit.threshold + fit.scale / fit.shape * (std::pow(tn, fit.shape) - 1.0);
}

double EventDistribution::event_cdf(double v) const {
  return std::visit([v](const auto& fit) { return fit.cdf(v); }, law);
}

double EventDistribution::annual_cdf(double v) const {
  return std::exp(-annual_rate * (1.0 - event_cdf(v)));
}

double MixtureModel::annual_cdf(double v) const {
  double product = 1.0;
  for (const EventDistribution& component : components) {
    product *= component.annual_cdf(v);
  }
  return product;
}

std::optional<double> MixtureModel::return_level(double t_years, double bracket_lo,
                                                 double bracket_hi) const {
  if (!(t_years > 0.0)) {
    throw ValidationError("return period must be positive");
  }
  const double target = 1.0 - 1.0 / t_years;  // annual CDF at the design speed
  if (annual_cdf(bracket_lo) >= target) {
    return std::nullopt;  // solution below the POT threshold
  }
  if (annual_cdf(bracket_hi) < target) {
    throw NumericError("mixture return level: no bracket below " +
                       std::to_string(bracket_hi) + " m/s for T = " +
                       std::to_string(t_years));
  }
  double lo = bracket_lo, hi = bracket_hi;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (annual_cdf(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> log_spaced_grid(double t_min, double t_max, int points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2) {
    throw ConfigError("bad return-period grid");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double log_min = std::log(t_min);
  const double log_max = std::log(t_max);
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(log_min + (log_max - log_min) * i / (points - 1));
  }
  return grid;
}

std::vector<double> default_period_grid() { return log_spaced_grid(1.0, 1000.0, 30); }

std::map<int, double> annual_maxima(std::span<const ingest::MetRecord> records,
                                    double min_valid_fraction) {
  struct YearAgg {
    int valid = 0;
    double max_speed = -std::numeric_limits<double>::infinity();
  };
  std::map<int, YearAgg> by_year;
  for (const auto& rec : records) {
    if (!rec.wind_speed_ms) {
      continue;
    }
    YearAgg& agg = by_year[year_of(rec.time)];
    ++agg.valid;
    agg.max_speed = std::max(agg.max_speed, *rec.wind_speed_ms);
  }
  std::map<int, double> maxima;
  for (const auto& [year, agg] : by_year) {
    const int expected_slots = days_in_year(year) * 8;
    if (agg.valid >= min_valid_fraction * expected_slots) {
      maxima[year] = agg.max_speed;
    }
  }
  return maxima;
}

std::vector<std::optional<double>> mixture_curve(const MixtureModel& mixture,
                                                 std::span<const double> period_grid,
                                                 double bracket_lo) {
  std::vector<std::optional<double>> curve;
  curve.reserve(period_grid.size());
  for (double t : period_grid) {
    curve.push_back(mixture.return_level(t, bracket_lo));
  }
  return curve;
}

}  // namespace windclime::evt
