#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "votedel/distributions.hpp"
#include "votedel/probability_engine.hpp"
#include "votedel/rng.hpp"
#include "votedel/tally_kernels.hpp"
#include "votedel/weighted_majority.hpp"

// Monte Carlo counterpart of the probability engine. Every trial replays the
// generative story literally — draw the electorate, draw types, place ballots
// — so agreement with the closed-form sums is genuine cross-verification.

namespace votedel {

struct SimulationConfig {
  VoterCountDistribution dist = VoterCountDistribution::point_mass(0);
  double p = 0.5;
  DelegationPolicy policy{};
  long long trials = 100000;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("SimulationConfig: p must be in (0,1)");
    if (trials < 1) throw std::invalid_argument("SimulationConfig: trials must be >= 1");
  }
};

struct SimulationReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
  double wins = 0.0;  // tie trials contribute 1/2
};

namespace detail {

inline SimulationReport finish_report(double wins, long long trials, std::uint64_t seed) {
  SimulationReport report;
  report.trials = trials;
  report.seed = seed;
  report.wins = wins;
  report.estimate = wins / static_cast<double>(trials);
  report.std_error =
      std::sqrt(std::max(0.0, report.estimate * (1.0 - report.estimate)) /
                static_cast<double>(trials));
  report.ci95_low = std::max(0.0, report.estimate - 1.96 * report.std_error);
  report.ci95_high = std::min(1.0, report.estimate + 1.96 * report.std_error);
  return report;
}

// Inverse-CDF sampler over a truncated support table (tail 1e-12, far below
// any tolerance used when comparing simulations against the engine).
class CountSampler {
 public:
  explicit CountSampler(const VoterCountDistribution& dist) {
    const TruncationPlan plan = plan_truncation(dist, {1e-12, {}});
    double cum = 0.0;
    if (dist.kind() == VoterCountDistribution::Kind::Poisson) {
      for (int i = 0; i <= plan.index; ++i) {
        counts_.push_back(i);
        cum += dist.pmf(i);
        cdf_.push_back(cum);
      }
    } else {
      for (const auto& [count, mass] : dist.entries()) {
        counts_.push_back(count);
        cum += mass;
        cdf_.push_back(cum);
      }
    }
    cdf_.back() = 1.0;  // absorb the truncated tail into the last bucket
  }

  template <class Rng>
  int sample(Rng& rng) const {
    const double u = uniform_unit(rng);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return counts_[static_cast<std::size_t>(it - cdf_.begin())];
  }

 private:
  std::vector<int> counts_;
  std::vector<double> cdf_;
};

// One realized election, conditional on the split: place ballots per the
// policy and return A's win credit (1, 1/2, 0).
template <class Rng>
double play_tally(int a_voters, int b_voters, const DelegationPolicy& policy, Rng& rng) {
  const int voters = a_voters + b_voters;
  const int m = policy.delegators;
  switch (policy.kind) {
    case DelegationPolicy::Kind::Conventional:
      return majority_indicator(a_voters, b_voters);

    case DelegationPolicy::Kind::Free: {
      if (voters == 0) return 0.5;  // all ballots discarded, fair coin
      int to_a = 0;
      for (int b = 0; b < m; ++b)
        if (uniform_below(rng, static_cast<std::uint64_t>(voters)) <
            static_cast<std::uint64_t>(a_voters))
          ++to_a;
      return majority_indicator(a_voters + to_a, b_voters + (m - to_a));
    }

    case DelegationPolicy::Kind::CappedFormula: {
      // The closed-form rule: draw the binomial split of ballots, then clip
      // each party's total at cap * (party size); the overflow evaporates.
      if (voters == 0) return 0.5;
      int to_a = 0;
      for (int b = 0; b < m; ++b)
        if (uniform_below(rng, static_cast<std::uint64_t>(voters)) <
            static_cast<std::uint64_t>(a_voters))
          ++to_a;
      const long long cap = policy.cap;
      const long long a_total = std::min<long long>(a_voters + to_a, cap * a_voters);
      const long long b_total =
          std::min<long long>(b_voters + (m - to_a), cap * b_voters);
      return majority_indicator(a_total, b_total);
    }

    case DelegationPolicy::Kind::CappedProcess: {
      // Sequential placement: each ballot picks a uniformly random voter; a
      // voter at the cap bounces the ballot to a uniformly random voter still
      // below the cap (any party). Stops when ballots or eligible voters run
      // out. Equivalent single-draw form: pick directly among the eligible.
      if (voters == 0) return 0.5;
      std::vector<int> votes(static_cast<std::size_t>(voters), 1);
      // Voters already at the cap get no ballot; with cap = 1 that is everyone.
      int at_cap = 0;
      for (const int v : votes)
        if (v >= policy.cap) ++at_cap;
      int eligible = voters - at_cap;
      int left = m;
      while (left > 0 && eligible > 0) {
        std::uint64_t pick =
            uniform_below(rng, static_cast<std::uint64_t>(eligible));
        for (std::size_t j = 0; j < votes.size(); ++j) {
          if (votes[j] >= policy.cap) continue;
          if (pick == 0) {
            if (++votes[j] >= policy.cap) --eligible;
            break;
          }
          --pick;
        }
        --left;
      }
      long long a_total = 0, b_total = 0;
      for (int j = 0; j < voters; ++j)
        (j < a_voters ? a_total : b_total) += votes[j];
      return majority_indicator(a_total, b_total);
    }
  }
  throw std::logic_error("play_tally: unreachable policy kind");
}

}  // namespace detail

// Unconditional simulation: voter count ~ dist, types i.i.d. Bernoulli(p),
// then the policy's ballot placement. Fully deterministic in (seed, trials).
inline SimulationReport simulate(const SimulationConfig& config) {
  config.validate();
  const detail::CountSampler sampler(config.dist);
  double wins = 0.0;
  for (long long t = 0; t < config.trials; ++t) {
    auto rng = trial_stream(config.seed, static_cast<std::uint64_t>(t));
    const int voters = sampler.sample(rng);
    int a_voters = 0;
    for (int v = 0; v < voters; ++v)
      if (bernoulli(rng, config.p)) ++a_voters;
    wins += detail::play_tally(a_voters, voters - a_voters, config.policy, rng);
  }
  return detail::finish_report(wins, config.trials, config.seed);
}

// Conditional simulation with the split held fixed — estimates a kernel value
// directly, which is how the formula-vs-process divergence is exhibited.
inline SimulationReport simulate_tally(int a_voters, int b_voters,
                                       const DelegationPolicy& policy, long long trials,
                                       std::uint64_t seed) {
  if (a_voters < 0 || b_voters < 0)
    throw std::invalid_argument("simulate_tally: counts must be >= 0");
  if (trials < 1) throw std::invalid_argument("simulate_tally: trials must be >= 1");
  double wins = 0.0;
  for (long long t = 0; t < trials; ++t) {
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(t));
    wins += detail::play_tally(a_voters, b_voters, policy, rng);
  }
  return detail::finish_report(wins, trials, seed);
}

// Joint distribution over (a_voters, b_voters) pairs: the corner cases where
// types are correlated with turnout and delegation can help rather than hurt.
struct JointCountDistribution {
  struct Entry {
    int a_voters = 0;
    int b_voters = 0;
    double mass = 0.0;
  };
  std::vector<Entry> entries;

  void validate() const {
    if (entries.empty()) throw std::invalid_argument("JointCountDistribution: empty");
    double total = 0.0;
    for (const auto& e : entries) {
      if (e.a_voters < 0 || e.b_voters < 0)
        throw std::invalid_argument("JointCountDistribution: negative counts");
      if (!(e.mass >= 0.0))
        throw std::invalid_argument("JointCountDistribution: negative mass");
      total += e.mass;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("JointCountDistribution: masses must sum to 1");
  }
};

inline double joint_conventional_prob(const JointCountDistribution& joint) {
  joint.validate();
  double acc = 0.0;
  for (const auto& e : joint.entries)
    acc += e.mass * majority_indicator(e.a_voters, e.b_voters);
  return acc;
}

inline double joint_free_delegation_prob(const JointCountDistribution& joint,
                                         int delegators) {
  joint.validate();
  double acc = 0.0;
  for (const auto& e : joint.entries)
    acc += e.mass * free_delegation_kernel(e.a_voters, e.b_voters, delegators);
  return acc;
}

inline SimulationReport simulate_joint(const JointCountDistribution& joint, int delegators,
                                       long long trials, std::uint64_t seed) {
  joint.validate();
  if (trials < 1) throw std::invalid_argument("simulate_joint: trials must be >= 1");
  std::vector<double> cdf;
  double cum = 0.0;
  for (const auto& e : joint.entries) {
    cum += e.mass;
    cdf.push_back(cum);
  }
  cdf.back() = 1.0;
  const DelegationPolicy policy = DelegationPolicy::free_delegation(delegators);
  double wins = 0.0;
  for (long long t = 0; t < trials; ++t) {
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(t));
    const double u = uniform_unit(rng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto& e = joint.entries[static_cast<std::size_t>(it - cdf.begin())];
    wins += detail::play_tally(e.a_voters, e.b_voters, policy, rng);
  }
  return detail::finish_report(wins, trials, seed);
}

// Five-member jury: three members vote informed (independently correct with
// probability p), two are uninformed and either abstain — leaving a simple
// majority among the three — or hand their ballots to uniformly random
// informed members.
struct JuryExampleResult {
  double abstain_prob = 0.0;      // 3-voter simple majority: p^2 (3 - 2p)
  double delegate_prob = 0.0;     // both extra ballots delegated uniformly
  double same_member_prob = 0.0;  // both ballots landing on one member
};

// Exact enumeration of the 3^2 equally likely assignments of the two ballots;
// each assignment is a weighted-majority election over the three members.
inline JuryExampleResult jury_example(double p) {
  if (!(p > 0.5 && p < 1.0))
    throw std::invalid_argument("jury_example: p must be in (0.5, 1)");
  JuryExampleResult result;
  result.abstain_prob = p * p * (3.0 - 2.0 * p);
  double acc = 0.0;
  int same = 0;
  for (int first = 0; first < 3; ++first) {
    for (int second = 0; second < 3; ++second) {
      WeightedProfile profile{{1.0, 1.0, 1.0}};
      profile.weights[first] += 1.0;
      profile.weights[second] += 1.0;
      acc += weighted_majority_prob(profile, p) / 9.0;
      if (first == second) ++same;
    }
  }
  result.delegate_prob = acc;
  result.same_member_prob = same / 9.0;
  return result;
}

}  // namespace votedel
