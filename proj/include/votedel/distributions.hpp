#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "votedel/numeric.hpp"

// Distributions of the random number of conventional voters, plus the
// truncation policy used whenever an infinite support has to be cut off.

namespace votedel {

struct TruncationBudget {
  // Upper bound on the probability mass allowed beyond the truncation index.
  double tail_mass_bound = 1e-9;
  // Hard safety cap on the support scan; unset means ceil(max(10*mean, 200)).
  std::optional<int> max_support{};

  void validate() const {
    if (!(tail_mass_bound > 0.0) || !(tail_mass_bound < 1.0))
      throw std::invalid_argument("TruncationBudget: tail_mass_bound must be in (0,1)");
    if (max_support && *max_support < 1)
      throw std::invalid_argument("TruncationBudget: max_support must be positive");
  }
};

class VoterCountDistribution {
 public:
  enum class Kind { Poisson, Explicit, PointMass };

  static VoterCountDistribution poisson(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean))
      throw std::invalid_argument("poisson: mean must be positive and finite");
    VoterCountDistribution d;
    d.kind_ = Kind::Poisson;
    d.mean_ = mean;
    return d;
  }

  static VoterCountDistribution point_mass(int count) {
    if (count < 0) throw std::invalid_argument("point_mass: count must be >= 0");
    VoterCountDistribution d;
    d.kind_ = Kind::PointMass;
    d.mean_ = count;
    d.entries_ = {{count, 1.0}};
    return d;
  }

  // Finite pmf given as (count, mass) pairs. Masses must be non-negative and
  // sum to 1 within 1e-9; they are renormalized to remove the residual.
  static VoterCountDistribution explicit_pmf(const std::vector<std::pair<int, double>>& entries) {
    if (entries.empty()) throw std::invalid_argument("explicit_pmf: empty support");
    std::map<int, double> merged;
    double total = 0.0;
    for (const auto& [count, mass] : entries) {
      if (count < 0) throw std::invalid_argument("explicit_pmf: negative count");
      if (!(mass >= 0.0) || !std::isfinite(mass))
        throw std::invalid_argument("explicit_pmf: masses must be non-negative");
      merged[count] += mass;
      total += mass;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("explicit_pmf: masses sum to " + std::to_string(total) +
                                  ", not 1 within 1e-9");
    VoterCountDistribution d;
    d.kind_ = Kind::Explicit;
    double mean = 0.0;
    for (const auto& [count, mass] : merged) {
      d.entries_.emplace_back(count, mass / total);
      mean += count * (mass / total);
    }
    d.mean_ = mean;
    return d;
  }

  // Literal grammar: "poisson:<mean>" | "point:<count>" | "explicit:<c>=<w>,...".
  static VoterCountDistribution parse(const std::string& literal) {
    const auto colon = literal.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("distribution literal needs '<kind>:<args>': " + literal);
    const std::string kind = literal.substr(0, colon);
    const std::string args = literal.substr(colon + 1);
    if (kind == "poisson") return poisson(parse_number(args, "poisson mean"));
    if (kind == "point") return point_mass(parse_int(args, "point count"));
    if (kind == "explicit") {
      std::vector<std::pair<int, double>> entries;
      std::stringstream ss(args);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("explicit entry needs '<count>=<mass>': " + item);
        entries.emplace_back(parse_int(item.substr(0, eq), "explicit count"),
                             parse_number(item.substr(eq + 1), "explicit mass"));
      }
      return explicit_pmf(entries);
    }
    throw std::invalid_argument("unknown distribution kind: " + kind);
  }

  Kind kind() const { return kind_; }
  double mean() const { return mean_; }

  double pmf(int i) const {
    if (i < 0) return 0.0;
    switch (kind_) {
      case Kind::Poisson: {
        // exp(i*log(mean) - mean - log(i!)) evaluated in log space
        return std::exp(i * std::log(mean_) - mean_ - std::lgamma(i + 1.0));
      }
      case Kind::PointMass:
        return i == entries_.front().first ? 1.0 : 0.0;
      case Kind::Explicit: {
        const auto it = std::lower_bound(
            entries_.begin(), entries_.end(), i,
            [](const auto& e, int v) { return e.first < v; });
        return (it != entries_.end() && it->first == i) ? it->second : 0.0;
      }
    }
    return 0.0;
  }

  // Sorted, merged, normalized support; only meaningful for finite kinds.
  const std::vector<std::pair<int, double>>& entries() const {
    if (kind_ == Kind::Poisson)
      throw std::logic_error("entries(): Poisson support is not finite");
    return entries_;
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::Poisson:
        os << "poisson:" << format_number(mean_);
        break;
      case Kind::PointMass:
        os << "point:" << entries_.front().first;
        break;
      case Kind::Explicit: {
        os << "explicit:";
        bool first = true;
        for (const auto& [count, mass] : entries_) {
          if (!first) os << ',';
          os << count << '=' << format_number(mass);
          first = false;
        }
        break;
      }
    }
    return os.str();
  }

 private:
  VoterCountDistribution() = default;

  static double parse_number(const std::string& text, const char* what) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": not a number: " + text);
    }
    if (pos != text.size())
      throw std::invalid_argument(std::string(what) + ": trailing junk in: " + text);
    return value;
  }

  static int parse_int(const std::string& text, const char* what) {
    std::size_t pos = 0;
    long value = 0;
    try {
      value = std::stol(text, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": not an integer: " + text);
    }
    if (pos != text.size())
      throw std::invalid_argument(std::string(what) + ": trailing junk in: " + text);
    if (value < 0 || value > 1000000)
      throw std::invalid_argument(std::string(what) + ": out of range: " + text);
    return static_cast<int>(value);
  }

  static std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  Kind kind_ = Kind::PointMass;
  double mean_ = 0.0;
  std::vector<std::pair<int, double>> entries_;  // finite kinds only
};

struct TruncationPlan {
  int index;         // smallest I with P(N > I) <= tail_mass_bound
  double tail_mass;  // actual mass beyond index (0 for finite support)
};

inline TruncationPlan plan_truncation(const VoterCountDistribution& dist,
                                      const TruncationBudget& budget = {}) {
  budget.validate();
  if (dist.kind() != VoterCountDistribution::Kind::Poisson)
    return {dist.entries().back().first, 0.0};
  const int cap = budget.max_support
                      ? *budget.max_support
                      : static_cast<int>(std::ceil(std::max(10.0 * dist.mean(), 200.0)));
  double cum = 0.0;
  for (int i = 0; i <= cap; ++i) {
    cum += dist.pmf(i);
    if (1.0 - cum <= budget.tail_mass_bound) return {i, std::max(0.0, 1.0 - cum)};
  }
  throw std::runtime_error("plan_truncation: tail bound " +
                           std::to_string(budget.tail_mass_bound) +
                           " not reached within max_support " + std::to_string(cap));
}

inline int truncation_index(const VoterCountDistribution& dist,
                            const TruncationBudget& budget = {}) {
  return plan_truncation(dist, budget).index;
}

// Marginal pmf of the count of one voter type when the total is Poisson(n)
// and each voter independently has that type with probability p: Poisson(np).
inline double poisson_type_marginal(double n, double p, int k) {
  if (!(n > 0.0)) throw std::invalid_argument("poisson_type_marginal: n must be positive");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("poisson_type_marginal: p must be in [0,1]");
  if (k < 0) return 0.0;
  const double rate = n * p;
  if (rate == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0));
}

}  // namespace votedel
