#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace votedel {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline double clamp01(double x) {
  if (x < 0.0) return 0.0;
  if (x > 1.0) return 1.0;
  return x;
}

// Incrementally grown table of log(n!). Instances are cheap; share one per
// computation, not across threads.
class LogFactorials {
 public:
  double at(int n) {
    if (n < 0) throw std::invalid_argument("LogFactorials: negative argument");
    if (static_cast<std::size_t>(n) >= table_.size()) grow(n);
    return table_[static_cast<std::size_t>(n)];
  }

 private:
  void grow(int n) {
    if (table_.empty()) table_.push_back(0.0);  // log 0! = 0
    for (auto i = table_.size(); i <= static_cast<std::size_t>(n); ++i)
      table_.push_back(table_[i - 1] + std::log(static_cast<double>(i)));
  }

  std::vector<double> table_;
};

namespace detail {

// log of the Binomial(m, num/(num+den_other)) pmf at h, for integer odds
// num:den_other with num, den_other >= 1.
inline double log_binomial_pmf(int h, int m, double log_num, double log_other,
                               double log_total, LogFactorials& lf) {
  return lf.at(m) - lf.at(h) - lf.at(m - h) + h * log_num +
         (m - h) * log_other - m * log_total;
}

}  // namespace detail

inline BigInt binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

// Exact binary value of a double as a rational (every finite double is a
// dyadic rational).
inline BigRational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite");
  return BigRational(x);
}

}  // namespace votedel
