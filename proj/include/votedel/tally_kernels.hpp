#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "votedel/numeric.hpp"

// Tie-breaking tallies and the delegation kernels: the probability that party
// A wins once the voter split (a_voters, b_voters) is fixed and `delegators`
// abstaining ballots are handed to uniformly random voters.

namespace votedel {

// One realized election: party sizes, number of delegating ballots, and the
// per-voter vote cap when delegation is capped.
struct TallyInstance {
  int a_voters = 0;
  int b_voters = 0;
  int delegators = 0;
  std::optional<int> cap{};

  void validate() const {
    if (a_voters < 0 || b_voters < 0 || delegators < 0)
      throw std::invalid_argument("TallyInstance: counts must be >= 0");
    if (cap && *cap < 1)
      throw std::invalid_argument("TallyInstance: cap must be >= 1");
  }
};

// 1 if A's votes beat B's, 1/2 on a tie (fair coin), 0 otherwise.
inline double majority_indicator(long long a_votes, long long b_votes) {
  if (a_votes > b_votes) return 1.0;
  if (a_votes == b_votes) return 0.5;
  return 0.0;
}

namespace detail {

// Shared skeleton of both kernels:
//   sum_h Binomial(delegators, a/(a+b))(h) * tally(h)
// where h is the number of delegated ballots landing on party A. Terms are
// evaluated in log space so large `delegators` stay stable.
template <class Tally>
double delegation_kernel_sum(int a_voters, int b_voters, int delegators,
                             LogFactorials& lf, Tally&& tally) {
  if (a_voters < 0 || b_voters < 0 || delegators < 0)
    throw std::invalid_argument("delegation kernel: counts must be >= 0");
  if (a_voters == 0 && b_voters == 0) return 0.5;  // every ballot discarded
  if (b_voters == 0) return tally(delegators);
  if (a_voters == 0) return tally(0);
  const double log_a = std::log(static_cast<double>(a_voters));
  const double log_b = std::log(static_cast<double>(b_voters));
  const double log_ab = std::log(static_cast<double>(a_voters + b_voters));
  double acc = 0.0;
  for (int h = 0; h <= delegators; ++h) {
    const double t = tally(h);
    if (t == 0.0) continue;
    acc += t * std::exp(log_binomial_pmf(h, delegators, log_a, log_b, log_ab, lf));
  }
  return clamp01(acc);
}

inline double free_kernel_impl(int a_voters, int b_voters, int delegators,
                               LogFactorials& lf) {
  return delegation_kernel_sum(a_voters, b_voters, delegators, lf, [&](int h) {
    return majority_indicator(a_voters + h, b_voters + (delegators - h));
  });
}

inline double capped_kernel_impl(int a_voters, int b_voters, int delegators,
                                 int cap, LogFactorials& lf) {
  if (cap < 1) throw std::invalid_argument("capped kernel: cap must be >= 1");
  if (a_voters < 0 || b_voters < 0 || delegators < 0)
    throw std::invalid_argument("delegation kernel: counts must be >= 0");
  // cap 1: every voter already holds their one vote, no ballot can land
  if (cap == 1 && (a_voters > 0 || b_voters > 0))
    return majority_indicator(a_voters, b_voters);
  return delegation_kernel_sum(a_voters, b_voters, delegators, lf, [&](int h) {
    const long long a_total =
        std::min<long long>(a_voters + h, static_cast<long long>(cap) * a_voters);
    const long long b_total = std::min<long long>(
        b_voters + (delegators - h), static_cast<long long>(cap) * b_voters);
    return majority_indicator(a_total, b_total);
  });
}

}  // namespace detail

// P(A wins | split) when every delegated ballot goes to a uniformly random
// voter with no cap on how many ballots one voter may hold.
inline double free_delegation_kernel(int a_voters, int b_voters, int delegators) {
  LogFactorials lf;
  return detail::free_kernel_impl(a_voters, b_voters, delegators, lf);
}

// Same, but a voter's total is clipped at `cap` votes; ballots assigned past a
// party's aggregate capacity are discarded (the closed-form rule — contrast
// with the sequential reassignment process in the simulator).
inline double capped_delegation_kernel(int a_voters, int b_voters, int delegators,
                                       int cap) {
  LogFactorials lf;
  return detail::capped_kernel_impl(a_voters, b_voters, delegators, cap, lf);
}

}  // namespace votedel
