#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "votedel/numeric.hpp"

// Exact-rational twins of the floating point kernels. These exist to anchor
// tests: they share no code path with the log-space implementations, so
// agreement between the two is meaningful evidence.

namespace votedel {

class ExactProbability {
 public:
  ExactProbability() = default;  // zero
  explicit ExactProbability(BigRational value) : value_(std::move(value)) {
    if (value_ < 0 || value_ > 1)
      throw std::domain_error("ExactProbability: value outside [0,1]");
  }

  static ExactProbability ratio(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("ExactProbability: zero denominator");
    return ExactProbability(BigRational(num, den));
  }

  const BigRational& value() const { return value_; }
  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }
  double to_double() const { return value_.convert_to<double>(); }

  std::string to_string() const {
    return numerator().str() + "/" + denominator().str();
  }

  friend bool operator==(const ExactProbability& a, const ExactProbability& b) {
    return a.value_ == b.value_;
  }
  friend bool operator!=(const ExactProbability& a, const ExactProbability& b) {
    return !(a == b);
  }

  friend ExactProbability operator+(const ExactProbability& a, const ExactProbability& b) {
    return ExactProbability(a.value_ + b.value_);
  }

 private:
  BigRational value_;
};

inline ExactProbability majority_indicator_exact(long long a_votes, long long b_votes) {
  if (a_votes > b_votes) return ExactProbability(BigRational(1));
  if (a_votes == b_votes) return ExactProbability(BigRational(1, 2));
  return ExactProbability();
}

namespace detail {

// Exact version of the shared kernel skeleton. Weight of h ballots on A is
// C(m,h) * a^h * b^(m-h) / (a+b)^m, all in exact integers.
template <class Tally>
ExactProbability exact_kernel_sum(int a_voters, int b_voters, int delegators,
                                  Tally&& tally) {
  if (a_voters < 0 || b_voters < 0 || delegators < 0)
    throw std::invalid_argument("exact kernel: counts must be >= 0");
  if (a_voters + b_voters > 40 || delegators > 64)
    throw std::invalid_argument("exact kernel: scale cap is a+b <= 40, delegators <= 64");
  if (a_voters == 0 && b_voters == 0) return ExactProbability(BigRational(1, 2));
  if (b_voters == 0) return tally(delegators);
  if (a_voters == 0) return tally(0);
  const BigInt a = a_voters, b = b_voters;
  BigInt a_pow = 1;  // a^h, advanced with h
  BigInt b_pow = boost::multiprecision::pow(b, static_cast<unsigned>(delegators));
  BigInt den = boost::multiprecision::pow(a + b, static_cast<unsigned>(delegators));
  BigRational acc = 0;
  for (int h = 0; h <= delegators; ++h) {
    const ExactProbability t = tally(h);
    if (t.value() != 0)
      acc += BigRational(binomial_coefficient(delegators, h) * a_pow * b_pow, den) *
             t.value();
    a_pow *= a;
    if (h < delegators) b_pow /= b;
  }
  return ExactProbability(acc);
}

}  // namespace detail

inline ExactProbability free_delegation_kernel_exact(int a_voters, int b_voters,
                                                     int delegators) {
  return detail::exact_kernel_sum(a_voters, b_voters, delegators, [&](int h) {
    return majority_indicator_exact(a_voters + h, b_voters + (delegators - h));
  });
}

inline ExactProbability capped_delegation_kernel_exact(int a_voters, int b_voters,
                                                       int delegators, int cap) {
  if (cap < 1) throw std::invalid_argument("exact capped kernel: cap must be >= 1");
  return detail::exact_kernel_sum(a_voters, b_voters, delegators, [&](int h) {
    const long long a_total =
        std::min<long long>(a_voters + h, static_cast<long long>(cap) * a_voters);
    const long long b_total = std::min<long long>(
        b_voters + (delegators - h), static_cast<long long>(cap) * b_voters);
    return majority_indicator_exact(a_total, b_total);
  });
}

// Exact win probability of the sequential capped process: ballots are placed
// one at a time on a voter chosen uniformly among those still below the cap
// (either party); placement stops when ballots or uncapped voters run out.
// Small-scale oracle: memoized recursion over occupancy profiles.
inline ExactProbability capped_process_kernel_exact(int a_voters, int b_voters,
                                                    int delegators, int cap) {
  if (a_voters < 0 || b_voters < 0 || delegators < 0)
    throw std::invalid_argument("process kernel: counts must be >= 0");
  if (cap < 1) throw std::invalid_argument("process kernel: cap must be >= 1");
  if (a_voters + b_voters > 12 || delegators > 12)
    throw std::invalid_argument("process kernel: oracle scale cap is a+b <= 12, delegators <= 12");

  // A voter placed v times holds v+1 votes; with `delegators` placements no
  // voter can exceed 1 + delegators votes, so slots beyond that are dead.
  const int levels = std::min(cap, delegators + 1);
  // State: per-party occupancy of each vote level, plus ballots left to place.
  using State = std::vector<int>;
  std::map<State, BigRational> memo;

  auto pack = [&](const std::vector<int>& a_lv, const std::vector<int>& b_lv, int left) {
    State s;
    s.reserve(a_lv.size() + b_lv.size() + 1);
    s.insert(s.end(), a_lv.begin(), a_lv.end());
    s.insert(s.end(), b_lv.begin(), b_lv.end());
    s.push_back(left);
    return s;
  };

  auto tally = [&](const std::vector<int>& lv) {
    long long total = 0;
    for (std::size_t v = 0; v < lv.size(); ++v)
      total += static_cast<long long>(v + 1) * lv[v];
    return total;
  };

  std::function<BigRational(std::vector<int>&, std::vector<int>&, int)> win =
      [&](std::vector<int>& a_lv, std::vector<int>& b_lv, int left) -> BigRational {
    // Voters still below the cap. With cap = 1 this is always zero: everyone
    // starts at the cap and no ballot can be placed.
    long long uncapped = 0;
    for (int v = 0; v < levels; ++v)
      if (v + 1 < cap) uncapped += a_lv[v] + b_lv[v];
    if (left == 0 || uncapped == 0) {
      const long long ta = tally(a_lv), tb = tally(b_lv);
      return ta > tb ? BigRational(1) : (ta == tb ? BigRational(1, 2) : BigRational(0));
    }
    const State key = pack(a_lv, b_lv, left);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    BigRational acc = 0;
    for (int v = 0; v + 1 < levels; ++v) {
      if (a_lv[v] > 0) {
        const int n = a_lv[v];
        --a_lv[v]; ++a_lv[v + 1];
        acc += BigRational(n, uncapped) * win(a_lv, b_lv, left - 1);
        ++a_lv[v]; --a_lv[v + 1];
      }
      if (b_lv[v] > 0) {
        const int n = b_lv[v];
        --b_lv[v]; ++b_lv[v + 1];
        acc += BigRational(n, uncapped) * win(a_lv, b_lv, left - 1);
        ++b_lv[v]; --b_lv[v + 1];
      }
    }
    memo.emplace(key, acc);
    return acc;
  };

  std::vector<int> a_lv(levels, 0), b_lv(levels, 0);
  a_lv[0] = a_voters;
  b_lv[0] = b_voters;
  return ExactProbability(win(a_lv, b_lv, delegators));
}

}  // namespace votedel
