#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "votedel/distributions.hpp"
#include "votedel/tally_kernels.hpp"

// Unconditional win probabilities: the kernels averaged over the random voter
// count (outer sum) and the random A/B split (inner binomial sum).

namespace votedel {

struct DelegationPolicy {
  enum class Kind { Conventional, Free, CappedFormula, CappedProcess };

  Kind kind = Kind::Conventional;
  int delegators = 0;  // ignored for Conventional
  int cap = 1;         // meaningful for the capped kinds only

  static DelegationPolicy conventional() { return {}; }

  static DelegationPolicy free_delegation(int delegators) {
    require(delegators >= 0, "free_delegation: delegators must be >= 0");
    return {Kind::Free, delegators, 1};
  }

  static DelegationPolicy capped_formula(int delegators, int cap) {
    require(delegators >= 0, "capped_formula: delegators must be >= 0");
    require(cap >= 1, "capped_formula: cap must be >= 1");
    return {Kind::CappedFormula, delegators, cap};
  }

  static DelegationPolicy capped_process(int delegators, int cap) {
    require(delegators >= 0, "capped_process: delegators must be >= 0");
    require(cap >= 1, "capped_process: cap must be >= 1");
    return {Kind::CappedProcess, delegators, cap};
  }

  // Grammar: conv | free:<m> | capped:<m>,<c> | capped-process:<m>,<c>
  static DelegationPolicy parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon == std::string::npos ? text.size() : colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "conv") {
      require(args.empty(), "policy conv takes no arguments");
      return conventional();
    }
    if (name == "free") return free_delegation(parse_int(args, "free policy delegators"));
    if (name == "capped" || name == "capped-process") {
      const auto comma = args.find(',');
      require(comma != std::string::npos, "policy " + name + " needs '<m>,<c>'");
      const int m = parse_int(args.substr(0, comma), "capped policy delegators");
      const int c = parse_int(args.substr(comma + 1), "capped policy cap");
      return name == "capped" ? capped_formula(m, c) : capped_process(m, c);
    }
    throw std::invalid_argument("unknown policy: " + text);
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Conventional: return "conv";
      case Kind::Free: return "free:" + std::to_string(delegators);
      case Kind::CappedFormula:
        return "capped:" + std::to_string(delegators) + "," + std::to_string(cap);
      case Kind::CappedProcess:
        return "capped-process:" + std::to_string(delegators) + "," + std::to_string(cap);
    }
    return "conv";
  }

 private:
  static void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  static int parse_int(const std::string& text, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(text, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": not an integer: " + text);
    }
    if (pos != text.size() || v < 0 || v > 1000000)
      throw std::invalid_argument(std::string(what) + ": bad value: " + text);
    return static_cast<int>(v);
  }
};

struct WinProbability {
  double value = 0.0;
  double truncation_error = 0.0;  // outer-sum mass dropped by truncation
  DelegationPolicy policy{};
  double p = 0.0;
  std::string dist;  // literal of the voter-count distribution
};

// Lazily memoized kernel values over a fixed policy; the engine touches each
// split (a, b) with a + b <= truncation index many times across the outer sum.
class KernelTable {
 public:
  KernelTable(const DelegationPolicy& policy, int max_total)
      : policy_(policy),
        size_(static_cast<std::size_t>(max_total) + 1),
        cells_(size_ * size_, std::numeric_limits<double>::quiet_NaN()) {
    if (policy.kind == DelegationPolicy::Kind::CappedProcess)
      throw std::invalid_argument(
          "KernelTable: the sequential process has no closed-form kernel; "
          "use the simulator or the exact small-scale oracle");
  }

  double at(int a_voters, int b_voters) {
    double& cell = cells_[static_cast<std::size_t>(a_voters) * size_ + b_voters];
    if (std::isnan(cell)) cell = compute(a_voters, b_voters);
    return cell;
  }

 private:
  double compute(int a, int b) {
    switch (policy_.kind) {
      case DelegationPolicy::Kind::Conventional:
        return majority_indicator(a, b);
      case DelegationPolicy::Kind::Free:
        return detail::free_kernel_impl(a, b, policy_.delegators, lf_);
      case DelegationPolicy::Kind::CappedFormula:
        return detail::capped_kernel_impl(a, b, policy_.delegators, policy_.cap, lf_);
      case DelegationPolicy::Kind::CappedProcess:
        break;
    }
    throw std::logic_error("KernelTable: unreachable policy kind");
  }

  DelegationPolicy policy_;
  std::size_t size_;
  std::vector<double> cells_;
  LogFactorials lf_;
};

// P(A wins) with voter count ~ dist, each voter independently A with
// probability p. The outer sum truncates per `budget`; the dropped mass is
// reported, never silently absorbed.
inline WinProbability win_probability(const VoterCountDistribution& dist, double p,
                                      const DelegationPolicy& policy,
                                      const TruncationBudget& budget = {}) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("win_probability: p must be in (0,1)");
  const TruncationPlan plan = plan_truncation(dist, budget);
  KernelTable kernel(policy, plan.index);
  LogFactorials lf;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double total = 0.0;
  for (int i = 0; i <= plan.index; ++i) {
    const double fi = dist.pmf(i);
    if (fi == 0.0) continue;
    double inner = 0.0;
    for (int a = 0; a <= i; ++a) {
      const double kv = kernel.at(a, i - a);
      if (kv == 0.0) continue;
      inner += kv * std::exp(detail::log_binomial_pmf(a, i, log_p, log_q, 0.0, lf));
    }
    total += fi * inner;
  }
  return {clamp01(total), plan.tail_mass, policy, p, dist.to_string()};
}

inline WinProbability conventional(const VoterCountDistribution& dist, double p,
                                   const TruncationBudget& budget = {}) {
  return win_probability(dist, p, DelegationPolicy::conventional(), budget);
}

inline WinProbability free_delegation(const VoterCountDistribution& dist, double p,
                                      int delegators, const TruncationBudget& budget = {}) {
  return win_probability(dist, p, DelegationPolicy::free_delegation(delegators), budget);
}

inline WinProbability capped_delegation(const VoterCountDistribution& dist, double p,
                                        int delegators, int cap,
                                        const TruncationBudget& budget = {}) {
  return win_probability(dist, p, DelegationPolicy::capped_formula(delegators, cap), budget);
}

// --- limit diagnostics ---------------------------------------------------

// Free delegation along an ascending p grid ending at (or before) p = 1.
// At p = 1 every realized voter backs A, so the win probability collapses to
// the truncated total mass: sum_i F(i) * [A wins with i voters + m ballots].
inline std::vector<std::pair<double, WinProbability>> limit_check_p_to_1(
    const VoterCountDistribution& dist, int delegators,
    const std::vector<double>& p_grid, const TruncationBudget& budget = {}) {
  if (delegators < 1) throw std::invalid_argument("limit_check_p_to_1: delegators must be >= 1");
  std::vector<std::pair<double, WinProbability>> out;
  out.reserve(p_grid.size());
  double prev = 0.0;
  for (const double p : p_grid) {
    if (!(p > 0.0 && p <= 1.0) || p < prev)
      throw std::invalid_argument("limit_check_p_to_1: grid must ascend within (0,1]");
    prev = p;
    if (p < 1.0) {
      out.emplace_back(p, free_delegation(dist, p, delegators, budget));
      continue;
    }
    const TruncationPlan plan = plan_truncation(dist, budget);
    double total = 0.0;
    for (int i = 0; i <= plan.index; ++i)
      total += dist.pmf(i) * majority_indicator(i + delegators, 0);
    WinProbability win{clamp01(total), plan.tail_mass,
                       DelegationPolicy::free_delegation(delegators), 1.0,
                       dist.to_string()};
    out.emplace_back(1.0, win);
  }
  return out;
}

// Free delegation as the expected electorate grows: dist = Poisson(n) for each
// n in the grid, with the delegator count chosen by m_rule(n). Requires
// p > 1/2 (the regime where the probability should climb toward 1).
inline std::vector<std::pair<double, WinProbability>> limit_check_n_to_inf(
    double p, const std::function<int(double)>& m_rule, const std::vector<double>& n_grid,
    const TruncationBudget& budget = {}) {
  if (!(p > 0.5 && p < 1.0))
    throw std::invalid_argument("limit_check_n_to_inf: p must be in (0.5, 1)");
  std::vector<std::pair<double, WinProbability>> out;
  out.reserve(n_grid.size());
  for (const double n : n_grid) {
    const auto dist = VoterCountDistribution::poisson(n);
    out.emplace_back(n, free_delegation(dist, p, m_rule(n), budget));
  }
  return out;
}

struct MSweepPoint {
  int delegators = 0;
  WinProbability win{};
  double gap_to_conventional = 0.0;  // conventional minus delegated
};

// Free delegation across a grid of delegator counts, with the gap to the
// conventional baseline. The gap is positive for every m >= 1 and shrinks
// again for large m, but not monotonically.
inline std::vector<MSweepPoint> limit_check_m_to_inf(const VoterCountDistribution& dist,
                                                     double p, const std::vector<int>& m_grid,
                                                     const TruncationBudget& budget = {}) {
  const WinProbability base = conventional(dist, p, budget);
  std::vector<MSweepPoint> out;
  out.reserve(m_grid.size());
  for (const int m : m_grid) {
    if (m < 0) throw std::invalid_argument("limit_check_m_to_inf: delegators must be >= 0");
    MSweepPoint point;
    point.delegators = m;
    point.win = free_delegation(dist, p, m, budget);
    point.gap_to_conventional = base.value - point.win.value;
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace votedel
