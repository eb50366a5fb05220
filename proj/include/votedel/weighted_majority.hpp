#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "votedel/numeric.hpp"
#include "votedel/rng.hpp"

// Fixed-electorate weighted majority voting: n voters with known weights,
// each independently correct with probability p. Win probability is computed
// by exhaustive subset enumeration, which caps n.

namespace votedel {

inline constexpr int kWeightedEnumerationCap = 20;  // 2^20 subsets is the comfort limit

struct WeightedProfile {
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }

  void validate() const {
    if (weights.empty() || size() > kWeightedEnumerationCap)
      throw std::invalid_argument("WeightedProfile: need 1.." +
                                  std::to_string(kWeightedEnumerationCap) + " voters");
    double total = 0.0;
    for (const double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("WeightedProfile: weights must be >= 0 and finite");
      total += w;
    }
    if (!(total > 0.0))
      throw std::invalid_argument("WeightedProfile: total weight must be positive");
  }
};

struct WeightedEnumeration {
  double win_prob = 0.0;
  // Whether some coalition of fewer than half the voters outweighs its
  // complement — the configurations that can push the weighted probability
  // below the unweighted one.
  bool light_subset_dominates = false;
  int tie_subsets = 0;  // subsets hitting exactly half the total weight
};

// One pass over all 2^n subsets of correct voters. Subset weights come from
// an incremental table (w[S] = w[S minus lowest bit] + that bit's weight), so
// the sweep is O(2^n) with exact reuse of partial sums.
inline WeightedEnumeration enumerate_weighted_majority(const WeightedProfile& profile,
                                                       double p) {
  profile.validate();
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("enumerate_weighted_majority: p must be in [0,1]");
  const int n = profile.size();
  double total = 0.0;
  for (const double w : profile.weights) total += w;

  std::vector<double> size_prob(n + 1);
  for (int s = 0; s <= n; ++s)
    size_prob[s] = std::pow(p, s) * std::pow(1.0 - p, n - s);

  const std::uint32_t subsets = 1u << n;
  std::vector<double> subset_weight(subsets, 0.0);
  WeightedEnumeration result;
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    double w = 0.0;
    if (mask) {
      const int low = std::countr_zero(mask);
      w = subset_weight[mask & (mask - 1)] + profile.weights[low];
      subset_weight[mask] = w;
    }
    const int members = std::popcount(mask);
    if (2.0 * w > total) {
      result.win_prob += size_prob[members];
      if (2 * members < n) result.light_subset_dominates = true;
    } else if (2.0 * w == total) {
      result.win_prob += 0.5 * size_prob[members];
      ++result.tie_subsets;
    }
  }
  result.win_prob = result.win_prob < 0.0 ? 0.0 : (result.win_prob > 1.0 ? 1.0 : result.win_prob);
  return result;
}

inline double weighted_majority_prob(const WeightedProfile& profile, double p) {
  return enumerate_weighted_majority(profile, p).win_prob;
}

// Equal weights: plain Binomial(n, p) majority, ties (even n) count half.
inline double unweighted_majority_prob(int n, double p) {
  if (n < 1 || n > kWeightedEnumerationCap)
    throw std::invalid_argument("unweighted_majority_prob: need 1.." +
                                std::to_string(kWeightedEnumerationCap) + " voters");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("unweighted_majority_prob: p must be in [0,1]");
  double acc = 0.0;
  for (int s = 0; s <= n; ++s) {
    const double weight = 2 * s > n ? 1.0 : (2 * s == n ? 0.5 : 0.0);
    if (weight == 0.0) continue;
    acc += weight * binomial_coefficient(n, s).convert_to<double>() * std::pow(p, s) *
           std::pow(1.0 - p, n - s);
  }
  return acc < 0.0 ? 0.0 : (acc > 1.0 ? 1.0 : acc);
}

struct DominanceReport {
  int samples = 0;
  int violations = 0;         // profiles with weighted > unweighted + 1e-12
  int equality_profiles = 0;  // |weighted - unweighted| <= 1e-12
  int light_dominant_profiles = 0;
  double max_gap = 0.0;  // largest unweighted - weighted
  double min_gap = 0.0;  // smallest (negative would be a violation)
};

// Checks that no weight vector beats equal weights, and reports how often the
// sufficient condition for equality (no light coalition outweighing its
// complement) actually bites.
inline DominanceReport weight_dominance_check(
    int n, double p, const std::vector<std::vector<double>>& weight_samples) {
  const double unweighted = unweighted_majority_prob(n, p);
  DominanceReport report;
  report.min_gap = 2.0;
  for (const auto& weights : weight_samples) {
    if (static_cast<int>(weights.size()) != n)
      throw std::invalid_argument("weight_dominance_check: sample size mismatch");
    const auto enumeration = enumerate_weighted_majority({weights}, p);
    const double gap = unweighted - enumeration.win_prob;
    ++report.samples;
    if (gap < -1e-12) ++report.violations;
    if (std::abs(gap) <= 1e-12) ++report.equality_profiles;
    if (enumeration.light_subset_dominates) ++report.light_dominant_profiles;
    report.max_gap = std::max(report.max_gap, gap);
    report.min_gap = std::min(report.min_gap, gap);
  }
  return report;
}

// Deterministic stress profiles: heavy-tailed positive weights, with every
// 13th sample skewed toward a near-dictator.
inline std::vector<std::vector<double>> sample_weight_vectors(int n, int count,
                                                              std::uint64_t seed) {
  if (n < 1 || n > kWeightedEnumerationCap || count < 1)
    throw std::invalid_argument("sample_weight_vectors: bad n or count");
  std::vector<std::vector<double>> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(j));
    std::vector<double> w(static_cast<std::size_t>(n));
    for (auto& wi : w) {
      const double u = uniform_unit(rng);
      wi = 1e-3 + u * u * u;  // cubed uniform: frequent near-zero weights
    }
    if (j % 13 == 5) w[0] *= 50.0;  // periodically test dictator-like vectors
    samples.push_back(std::move(w));
  }
  return samples;
}

}  // namespace votedel
