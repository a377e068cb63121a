#pragma once

// Closed-form bound calculators from the theory sections, plus an empirical
// estimator of the alignment probabilities they consume. Bounds outside [0,1]
// are returned raw (the caller may flag them vacuous); only robustness_bound
// clips, because clipping is part of its definition.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "patmark/detection.hpp"
#include "patmark/errors.hpp"
#include "patmark/pattern.hpp"

namespace patmark {

enum class AlignmentRegime { watermarked, unwatermarked };

struct AlignmentProfile {
  std::map<int, double> mu;  // window size → alignment probability
  std::map<int, double> se;  // MC standard error (estimator only)
  std::map<int, std::int64_t> window_counts;
  std::vector<int> skipped_sizes;  // requested but no text long enough
  AlignmentRegime regime = AlignmentRegime::watermarked;

  double at(int w) const {
    const auto it = mu.find(w);
    if (it == mu.end())
      throw BoundError("alignment profile missing window size " +
                       std::to_string(w));
    if (it->second < 0.0 || it->second > 1.0)
      throw BoundError("alignment probability outside [0, 1]");
    return it->second;
  }
};

// Δ^(w) = w·μ^(w) + 2·Σ_{k=1}^{w−1} (w−k)·μ^(w+k); needs sizes w..2w−1.
inline double delta_w(const AlignmentProfile& profile, int w) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  double delta = w * profile.at(w);
  for (int k = 1; k <= w - 1; ++k) delta += 2.0 * (w - k) * profile.at(w + k);
  return delta;
}

// Pr[|s|_E(t) < τ_e | no edit] ≤ exp(−w²(μ₁−τ_e)²/(2Δ^(w))); exactly 0 in the
// hard case μ₁ = 1, τ_e < 1.
inline double false_alarm_bound(const AlignmentProfile& profile, int w,
                                double tau_e) {
  const double mu1 = profile.at(w);
  if (!(tau_e < mu1))
    throw BoundError("false-alarm bound needs tau_e < mu1^(w)");
  if (mu1 == 1.0) return 0.0;
  const double gap = mu1 - tau_e;
  return std::exp(-(static_cast<double>(w) * w * gap * gap) /
                  (2.0 * delta_w(profile, w)));
}

// Pr[|s|_E(t) ≥ τ_e | edit] ≤ w·exp(−3(τ_e−μ₀)²/(4(2μ₀+τ_e))); may exceed 1.
inline double miss_detection_bound(double mu0_w, int w, double tau_e) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  if (mu0_w < 0.0 || mu0_w > 1.0)
    throw ConfigError("mu0 must be in [0, 1]");
  if (!(tau_e > mu0_w))
    throw BoundError("miss-detection bound needs tau_e > mu0^(w)");
  const double gap = tau_e - mu0_w;
  return w * std::exp(-3.0 * gap * gap / (4.0 * (2.0 * mu0_w + tau_e)));
}

// P(|s|_D ≥ τ_d) ≥ 1 − exp(−N(μ₁−τ_d)²/(2wμ₁)), N = T−w+1.
inline double watermark_power_bound(std::int64_t T, int w, double mu1_w,
                                    double tau_d) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  if (T < w) throw ConfigError("need T >= w");
  if (mu1_w <= 0.0 || mu1_w > 1.0) throw ConfigError("mu1 must be in (0, 1]");
  if (!(tau_d < mu1_w)) throw BoundError("power bound needs tau_d < mu1^(w)");
  const double n = static_cast<double>(T - w + 1);
  const double gap = mu1_w - tau_d;
  return 1.0 - std::exp(-n * gap * gap / (2.0 * w * mu1_w));
}

// Type-I ≤ w·exp(−N·3(τ_d−μ₀)²/(4w(2μ₀+τ_d))).
inline double watermark_type1_bound(std::int64_t T, int w, double mu0_w,
                                    double tau_d) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  if (T < w) throw ConfigError("need T >= w");
  if (mu0_w < 0.0 || mu0_w > 1.0) throw ConfigError("mu0 must be in [0, 1]");
  if (!(tau_d > mu0_w)) throw BoundError("type-1 bound needs tau_d > mu0^(w)");
  const double n = static_cast<double>(T - w + 1);
  const double gap = tau_d - mu0_w;
  return w * std::exp(-n * 3.0 * gap * gap /
                      (4.0 * w * (2.0 * mu0_w + tau_d)));
}

// μ̃₁ = (½α/(1+½(α−1))) · S(p, ½(α−1)/(1+½(α−1))), α = e^δ,
// S(p,z) = Σ_k p_k/(1+z·p_k). Rewritten via logistic/tanh so large δ cannot
// overflow: ½α/(1+½(α−1)) = 1/(1+e^{−δ}) and the z argument is tanh(δ/2).
inline double token_adherence_lower_bound(double delta,
                                          const std::vector<double>& p) {
  if (delta < 0.0) throw ConfigError("delta must be >= 0");
  if (p.empty()) throw DataError("empty probability vector");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DataError("probability entries must be finite and >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DataError("probabilities must sum to 1");
  const double lead = 1.0 / (1.0 + std::exp(-delta));
  const double z = std::tanh(delta / 2.0);
  double s = 0.0;
  for (double v : p) s += v / (1.0 + z * v);
  return lead * s;
}

// |s_edited|_D ≥ max(0, M − w(S_ins+S_del+S_rep)) / (N + S_ins − S_del).
inline double robustness_bound(std::int64_t M, std::int64_t N, int w,
                               std::int64_t S_ins, std::int64_t S_del,
                               std::int64_t S_rep) {
  if (w < 1) throw ConfigError("window length must be >= 1");
  if (M < 0 || N < 1 || M > N) throw DataError("need 0 <= M <= N, N >= 1");
  if (S_ins < 0 || S_del < 0 || S_rep < 0)
    throw DataError("edit token counts must be >= 0");
  const std::int64_t denominator = N + S_ins - S_del;
  if (denominator < 1) throw DataError("edited text has no windows left");
  const double numerator = std::max<double>(
      0.0, static_cast<double>(M) -
               static_cast<double>(w) * static_cast<double>(S_ins + S_del + S_rep));
  return numerator / static_cast<double>(denominator);
}

inline bool bound_vacuous(double value) {
  return !(value >= 0.0 && value <= 1.0);
}

// Pooled empirical window-match frequencies per size, with MC standard
// errors. Sizes no text can cover are recorded as skipped.
inline AlignmentProfile estimate_alignment(
    const std::vector<std::vector<Tag>>& corpus, const Pattern& pattern,
    const std::vector<int>& sizes,
    AlignmentRegime regime = AlignmentRegime::watermarked) {
  if (corpus.empty()) throw DataError("empty corpus");
  AlignmentProfile profile;
  profile.regime = regime;
  for (int w : sizes) {
    if (w < 1) throw ConfigError("window length must be >= 1");
    const auto windows = valid_windows(pattern, w);
    std::int64_t matches = 0, count = 0;
    for (const auto& tags : corpus) {
      if (tags.size() < static_cast<std::size_t>(w)) continue;
      const auto ind =
          window_indicators_fast(tags, w, windows, pattern.tag_count());
      matches += count_matches(ind);
      count += static_cast<std::int64_t>(ind.size());
    }
    if (count == 0) {
      profile.skipped_sizes.push_back(w);
      continue;
    }
    const double mu = static_cast<double>(matches) / static_cast<double>(count);
    profile.mu[w] = mu;
    profile.se[w] = std::sqrt(mu * (1.0 - mu) / static_cast<double>(count));
    profile.window_counts[w] = count;
  }
  return profile;
}

}  // namespace patmark
