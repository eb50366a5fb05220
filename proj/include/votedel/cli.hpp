#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "votedel/exact_kernels.hpp"
#include "votedel/probability_engine.hpp"
#include "votedel/simulator.hpp"
#include "votedel/weighted_majority.hpp"

// Command line front end. Everything routes through run() so tests can drive
// the tool in-process with captured streams.
//
// Exit codes: 0 success, 1 numeric mismatch (a check command found a
// deviation), 2 usage error (bad flags or literals).

namespace votedel::cli {

using nlohmann::json;

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

// --- published reference table -------------------------------------------

// Reference values reproduced by the `table1` command: expected electorate
// n = 20, correctness probability p = 0.6, cap c = 2. Published to 5-6
// decimals; used only as comparison targets, never as inputs.
struct PublishedTable1Entry {
  int delegators;
  double conventional;
  double free_delegation;
  double capped_delegation;
};

inline constexpr PublishedTable1Entry kPublishedTable1[] = {
    {1, 0.81413, 0.808443, 0.808443},
    {2, 0.81413, 0.804256, 0.804256},
    {5, 0.81413, 0.796578, 0.796616},
    {10, 0.81413, 0.791246, 0.792627},
    {300, 0.81413, 0.808516, 0.81413},
};

inline constexpr double kTable1Tolerance = 5e-6;
inline constexpr double kTable1Mean = 20.0;
inline constexpr double kTable1P = 0.6;
inline constexpr int kTable1Cap = 2;

struct Table1Row {
  int delegators = 0;
  PublishedTable1Entry published{};
  double conventional = 0.0;
  double free_delegation = 0.0;
  double capped_delegation = 0.0;

  double max_abs_delta() const {
    return std::max({std::abs(conventional - published.conventional),
                     std::abs(free_delegation - published.free_delegation),
                     std::abs(capped_delegation - published.capped_delegation)});
  }
};

inline std::vector<Table1Row> table1_rows(const TruncationBudget& budget = {}) {
  const auto dist = VoterCountDistribution::poisson(kTable1Mean);
  const double conv = conventional(dist, kTable1P, budget).value;
  std::vector<Table1Row> rows;
  for (const auto& entry : kPublishedTable1) {
    Table1Row row;
    row.delegators = entry.delegators;
    row.published = entry;
    row.conventional = conv;
    row.free_delegation = free_delegation(dist, kTable1P, entry.delegators, budget).value;
    row.capped_delegation =
        capped_delegation(dist, kTable1P, entry.delegators, kTable1Cap, budget).value;
    rows.push_back(row);
  }
  return rows;
}

// --- shared row type for single evaluations -------------------------------

struct ReportRow {
  std::string scenario;  // command that produced the row
  std::string dist;
  double p = 0.0;
  int delegators = 0;
  std::optional<int> cap{};
  std::string method;  // "exact" | "simulated"
  double value = 0.0;
  double error = 0.0;  // truncation bound (exact) or std error (simulated)
  std::optional<long long> trials{};
  std::optional<std::uint64_t> seed{};
};

inline json to_json(const ReportRow& row) {
  json j{{"scenario", row.scenario}, {"dist", row.dist},     {"p", row.p},
         {"delegators", row.delegators}, {"method", row.method}, {"value", row.value},
         {"error", row.error}};
  if (row.cap) j["cap"] = *row.cap;
  if (row.trials) j["trials"] = *row.trials;
  if (row.seed) j["seed"] = *row.seed;
  return j;
}

inline void write_csv_row(std::ostream& out, const ReportRow& row) {
  out << row.scenario << ',' << row.dist << ',' << fmt(row.p) << ',' << row.delegators
      << ',' << (row.cap ? std::to_string(*row.cap) : "") << ',' << row.method << ','
      << fmt(row.value) << ',' << fmt(row.error);
  if (row.trials) out << ',' << *row.trials << ',' << *row.seed;
  out << '\n';
}

inline constexpr const char* kReportRowCsvHeader =
    "scenario,dist,p,delegators,cap,method,value,error";

// --- command implementations ----------------------------------------------

namespace detail {

inline DelegationPolicy resolve_policy(const std::string& literal, int m, int c) {
  if (literal.find(':') != std::string::npos) return DelegationPolicy::parse(literal);
  if (literal == "conv") return DelegationPolicy::conventional();
  if (literal == "free") return DelegationPolicy::free_delegation(m);
  if (literal == "capped") return DelegationPolicy::capped_formula(m, c);
  if (literal == "capped-process") return DelegationPolicy::capped_process(m, c);
  throw std::invalid_argument("unknown policy: " + literal);
}

inline int policy_cap_or_default(const DelegationPolicy& policy) {
  return policy.kind == DelegationPolicy::Kind::CappedFormula ||
                 policy.kind == DelegationPolicy::Kind::CappedProcess
             ? policy.cap
             : 0;
}

}  // namespace detail

inline int cmd_table1(double tail, const std::string& format, std::ostream& out) {
  const TruncationBudget budget{tail, {}};
  const auto rows = table1_rows(budget);
  double max_delta = 0.0;
  for (const auto& row : rows) max_delta = std::max(max_delta, row.max_abs_delta());
  const bool pass = max_delta <= kTable1Tolerance;
  if (format == "json") {
    json j{{"command", "table1"},
           {"dist", "poisson:20"},
           {"p", kTable1P},
           {"cap", kTable1Cap},
           {"tail_bound", tail},
           {"tolerance", kTable1Tolerance},
           {"max_abs_delta", max_delta},
           {"pass", pass}};
    j["rows"] = json::array();
    for (const auto& row : rows) {
      j["rows"].push_back({{"delegators", row.delegators},
                           {"published_conventional", row.published.conventional},
                           {"published_free", row.published.free_delegation},
                           {"published_capped", row.published.capped_delegation},
                           {"conventional", row.conventional},
                           {"free_delegation", row.free_delegation},
                           {"capped_delegation", row.capped_delegation}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "delegators,published_conventional,published_free,published_capped,"
           "conventional,free_delegation,capped_delegation,max_abs_delta\n";
    for (const auto& row : rows) {
      out << row.delegators << ',' << fmt(row.published.conventional) << ','
          << fmt(row.published.free_delegation) << ','
          << fmt(row.published.capped_delegation) << ',' << fmt(row.conventional) << ','
          << fmt(row.free_delegation) << ',' << fmt(row.capped_delegation) << ','
          << fmt(row.max_abs_delta()) << '\n';
    }
    out << "# max_abs_delta=" << fmt(max_delta) << " tolerance=" << fmt(kTable1Tolerance)
        << " pass=" << (pass ? 1 : 0) << '\n';
  }
  return pass ? 0 : 1;
}

inline int cmd_exact(const VoterCountDistribution& dist, double p,
                     const DelegationPolicy& policy, double tail,
                     const std::string& format, std::ostream& out) {
  const WinProbability win = win_probability(dist, p, policy, {tail, {}});
  ReportRow row;
  row.scenario = "exact";
  row.dist = dist.to_string();
  row.p = p;
  row.delegators = policy.kind == DelegationPolicy::Kind::Conventional ? 0 : policy.delegators;
  if (const int c = detail::policy_cap_or_default(policy); c > 0) row.cap = c;
  row.method = "exact";
  row.value = win.value;
  row.error = win.truncation_error;
  if (format == "json") {
    json j = to_json(row);
    j["command"] = "exact";
    j["policy"] = policy.to_string();
    j["tail_bound"] = tail;
    out << j.dump(2) << '\n';
  } else {
    out << kReportRowCsvHeader << '\n';
    write_csv_row(out, row);
  }
  return 0;
}

inline int cmd_simulate(const VoterCountDistribution& dist, double p,
                        const DelegationPolicy& policy, long long trials,
                        std::uint64_t seed, const std::string& format, std::ostream& out) {
  SimulationConfig config;
  config.dist = dist;
  config.p = p;
  config.policy = policy;
  config.trials = trials;
  config.seed = seed;
  const SimulationReport report = simulate(config);
  ReportRow row;
  row.scenario = "simulate";
  row.dist = dist.to_string();
  row.p = p;
  row.delegators = policy.kind == DelegationPolicy::Kind::Conventional ? 0 : policy.delegators;
  if (const int c = detail::policy_cap_or_default(policy); c > 0) row.cap = c;
  row.method = "simulated";
  row.value = report.estimate;
  row.error = report.std_error;
  row.trials = report.trials;
  row.seed = report.seed;
  if (format == "json") {
    json j = to_json(row);
    j["command"] = "simulate";
    j["policy"] = policy.to_string();
    j["ci95_low"] = report.ci95_low;
    j["ci95_high"] = report.ci95_high;
    out << j.dump(2) << '\n';
  } else {
    out << kReportRowCsvHeader << ",trials,seed,ci95_low,ci95_high\n";
    out << row.scenario << ',' << row.dist << ',' << fmt(row.p) << ',' << row.delegators
        << ',' << (row.cap ? std::to_string(*row.cap) : "") << ',' << row.method << ','
        << fmt(row.value) << ',' << fmt(row.error) << ',' << *row.trials << ','
        << *row.seed << ',' << fmt(report.ci95_low) << ',' << fmt(report.ci95_high)
        << '\n';
  }
  return 0;
}

inline int cmd_sweep_m(const VoterCountDistribution& dist, double p, int m_max, int step,
                       double tail, const std::string& format, std::ostream& out) {
  if (m_max < 1) throw std::invalid_argument("sweep-m: --m must be >= 1");
  if (step < 1) throw std::invalid_argument("sweep-m: --step must be >= 1");
  const TruncationBudget budget{tail, {}};
  std::vector<int> grid;
  for (int m = 0; m <= m_max; m += step) grid.push_back(m);
  const auto points = limit_check_m_to_inf(dist, p, grid, budget);
  const double base = conventional(dist, p, budget).value;

  int argmin_m = points.front().delegators;
  double min_value = points.front().win.value;
  bool rose = false, fell = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].win.value < min_value) {
      min_value = points[i].win.value;
      argmin_m = points[i].delegators;
    }
    if (i > 0) {
      if (points[i].win.value > points[i - 1].win.value + 1e-15) rose = true;
      if (points[i].win.value < points[i - 1].win.value - 1e-15) fell = true;
    }
  }
  const bool non_monotone = rose && fell;

  if (format == "json") {
    json j{{"command", "sweep-m"}, {"dist", dist.to_string()},
           {"p", p},               {"tail_bound", tail},
           {"conventional", base}, {"argmin_m", argmin_m},
           {"min_value", min_value}, {"non_monotone", non_monotone}};
    j["rows"] = json::array();
    for (const auto& point : points)
      j["rows"].push_back({{"delegators", point.delegators},
                           {"value", point.win.value},
                           {"truncation_error", point.win.truncation_error},
                           {"gap_to_conventional", point.gap_to_conventional}});
    out << j.dump(2) << '\n';
  } else {
    out << "delegators,value,truncation_error,gap_to_conventional\n";
    for (const auto& point : points)
      out << point.delegators << ',' << fmt(point.win.value) << ','
          << fmt(point.win.truncation_error) << ',' << fmt(point.gap_to_conventional)
          << '\n';
    out << "# conventional=" << fmt(base) << " argmin_m=" << argmin_m
        << " min_value=" << fmt(min_value) << " non_monotone=" << (non_monotone ? 1 : 0)
        << '\n';
  }
  return 0;
}

inline int cmd_weighted(int n, double p, const std::vector<double>& weights, int samples,
                        std::uint64_t seed, const std::string& format, std::ostream& out) {
  if (!weights.empty()) {
    if (n != 0 && n != static_cast<int>(weights.size()))
      throw std::invalid_argument("weighted: --n contradicts --weights length");
    const WeightedProfile profile{weights};
    const auto enumeration = enumerate_weighted_majority(profile, p);
    const double unweighted = unweighted_majority_prob(profile.size(), p);
    const double gap = unweighted - enumeration.win_prob;
    if (format == "json") {
      json j{{"command", "weighted"},
             {"n", profile.size()},
             {"p", p},
             {"weights", weights},
             {"unweighted", unweighted},
             {"weighted", enumeration.win_prob},
             {"gap", gap},
             {"light_subset_dominates", enumeration.light_subset_dominates}};
      out << j.dump(2) << '\n';
    } else {
      out << "n,p,unweighted,weighted,gap,light_subset_dominates\n";
      out << profile.size() << ',' << fmt(p) << ',' << fmt(unweighted) << ','
          << fmt(enumeration.win_prob) << ',' << fmt(gap) << ','
          << (enumeration.light_subset_dominates ? 1 : 0) << '\n';
    }
    return gap < -1e-12 ? 1 : 0;
  }
  if (n < 1) throw std::invalid_argument("weighted: need --weights or --n with --samples");
  if (samples < 1) throw std::invalid_argument("weighted: --samples must be >= 1");
  const auto report = weight_dominance_check(n, p, sample_weight_vectors(n, samples, seed));
  if (format == "json") {
    json j{{"command", "weighted"},
           {"n", n},
           {"p", p},
           {"samples", report.samples},
           {"seed", seed},
           {"violations", report.violations},
           {"equality_profiles", report.equality_profiles},
           {"light_dominant_profiles", report.light_dominant_profiles},
           {"max_gap", report.max_gap},
           {"min_gap", report.min_gap}};
    out << j.dump(2) << '\n';
  } else {
    out << "n,p,samples,seed,violations,equality_profiles,light_dominant_profiles,"
           "max_gap,min_gap\n";
    out << n << ',' << fmt(p) << ',' << report.samples << ',' << seed << ','
        << report.violations << ',' << report.equality_profiles << ','
        << report.light_dominant_profiles << ',' << fmt(report.max_gap) << ','
        << fmt(report.min_gap) << '\n';
  }
  return report.violations == 0 ? 0 : 1;
}

// The correlated two-scenario electorate where delegation strictly helps:
// with probability 3/5 the split is (4, 2), with probability 2/5 it is (1, 2),
// one ballot is delegated. Conventional wins with exactly 3/5; delegation
// lifts that to exactly 2/3.
struct CounterexampleReport {
  ExactProbability conventional_exact;
  ExactProbability delegated_exact;
  SimulationReport sim;
  bool exact_match = false;  // computed rationals equal 3/5 and 2/3
  bool ci_covers = false;    // simulation CI covers the delegated value
};

inline CounterexampleReport counterexample_report(long long trials, std::uint64_t seed) {
  CounterexampleReport report;
  const BigRational heavy(3, 5), light(2, 5);
  report.conventional_exact =
      ExactProbability(heavy * majority_indicator_exact(4, 2).value() +
                       light * majority_indicator_exact(1, 2).value());
  report.delegated_exact =
      ExactProbability(heavy * free_delegation_kernel_exact(4, 2, 1).value() +
                       light * free_delegation_kernel_exact(1, 2, 1).value());
  report.exact_match = report.conventional_exact == ExactProbability(BigRational(3, 5)) &&
                       report.delegated_exact == ExactProbability(BigRational(2, 3));
  JointCountDistribution joint{{{4, 2, 0.6}, {1, 2, 0.4}}};
  report.sim = simulate_joint(joint, 1, trials, seed);
  const double target = report.delegated_exact.to_double();
  report.ci_covers = report.sim.ci95_low <= target && target <= report.sim.ci95_high;
  return report;
}

inline int cmd_counterexample(long long trials, std::uint64_t seed,
                              const std::string& format, std::ostream& out) {
  const CounterexampleReport report = counterexample_report(trials, seed);
  const bool pass = report.exact_match && report.ci_covers;
  if (format == "json") {
    json j{{"command", "counterexample"},
           {"joint", "(4,2)@0.6 (1,2)@0.4"},
           {"delegators", 1},
           {"conventional_exact", report.conventional_exact.to_string()},
           {"conventional_value", report.conventional_exact.to_double()},
           {"delegated_exact", report.delegated_exact.to_string()},
           {"delegated_value", report.delegated_exact.to_double()},
           {"estimate", report.sim.estimate},
           {"std_error", report.sim.std_error},
           {"ci95_low", report.sim.ci95_low},
           {"ci95_high", report.sim.ci95_high},
           {"trials", report.sim.trials},
           {"seed", report.sim.seed},
           {"exact_match", report.exact_match},
           {"ci_covers", report.ci_covers},
           {"pass", pass}};
    out << j.dump(2) << '\n';
  } else {
    out << "conventional_exact,conventional_value,delegated_exact,delegated_value,"
           "estimate,std_error,ci95_low,ci95_high,trials,seed\n";
    out << report.conventional_exact.to_string() << ','
        << fmt(report.conventional_exact.to_double()) << ','
        << report.delegated_exact.to_string() << ','
        << fmt(report.delegated_exact.to_double()) << ',' << fmt(report.sim.estimate)
        << ',' << fmt(report.sim.std_error) << ',' << fmt(report.sim.ci95_low) << ','
        << fmt(report.sim.ci95_high) << ',' << report.sim.trials << ',' << report.sim.seed
        << '\n';
    out << "# exact_match=" << (report.exact_match ? 1 : 0)
        << " ci_covers=" << (report.ci_covers ? 1 : 0) << " pass=" << (pass ? 1 : 0)
        << '\n';
  }
  return pass ? 0 : 1;
}

// --- argument wiring -------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Win probabilities for two-party elections with delegated ballots"};
  app.require_subcommand(1);

  std::string dist_literal = "poisson:20";
  double p = 0.6;
  std::string policy_literal = "conv";
  int m = 0;
  int cap = 1;
  double tail = 1e-9;
  long long trials = 100000;
  std::uint64_t seed = 1;
  std::string format = "csv";
  int m_step = 1;
  int weighted_n = 0;
  int weighted_samples = 0;
  std::string weights_literal;

  const auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  auto* table1 = app.add_subcommand("table1", "reproduce the published reference table");
  table1->add_option("--tail", tail, "truncation tail bound")->capture_default_str();
  add_format(table1);

  auto* exact = app.add_subcommand("exact", "closed-form win probability");
  exact->add_option("--dist", dist_literal, "voter count distribution")->required();
  exact->add_option("--p", p, "per-voter probability of backing A")->required();
  exact->add_option("--policy", policy_literal,
                    "conv | free:m | capped:m,c | capped-process:m,c");
  exact->add_option("--m", m, "delegator count (with bare policy names)");
  exact->add_option("--c", cap, "vote cap (with bare policy names)");
  exact->add_option("--tail", tail, "truncation tail bound")->capture_default_str();
  add_format(exact);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo win probability");
  simulate->add_option("--dist", dist_literal, "voter count distribution")->required();
  simulate->add_option("--p", p, "per-voter probability of backing A")->required();
  simulate->add_option("--policy", policy_literal,
                       "conv | free:m | capped:m,c | capped-process:m,c");
  simulate->add_option("--m", m, "delegator count (with bare policy names)");
  simulate->add_option("--c", cap, "vote cap (with bare policy names)");
  simulate->add_option("--trials", trials, "number of trials")->capture_default_str();
  simulate->add_option("--seed", seed, "master seed")->capture_default_str();
  add_format(simulate);

  auto* sweep = app.add_subcommand("sweep-m", "win probability across delegator counts");
  sweep->add_option("--dist", dist_literal, "voter count distribution")->required();
  sweep->add_option("--p", p, "per-voter probability of backing A")->required();
  sweep->add_option("--m", m, "largest delegator count")->required();
  sweep->add_option("--step", m_step, "grid step")->capture_default_str();
  sweep->add_option("--tail", tail, "truncation tail bound")->capture_default_str();
  add_format(sweep);

  auto* weighted = app.add_subcommand("weighted", "fixed-electorate weighted majority");
  weighted->add_option("--n", weighted_n, "number of voters");
  weighted->add_option("--p", p, "per-voter correctness probability")->required();
  weighted->add_option("--weights", weights_literal, "comma-separated weights");
  weighted->add_option("--samples", weighted_samples, "random profiles to check");
  weighted->add_option("--seed", seed, "master seed")->capture_default_str();
  add_format(weighted);

  auto* counter = app.add_subcommand(
      "counterexample", "correlated electorate where delegation strictly helps");
  counter->add_option("--trials", trials, "number of trials")->capture_default_str();
  counter->add_option("--seed", seed, "master seed")->capture_default_str();
  add_format(counter);

  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (table1->parsed()) return cmd_table1(tail, format, out);
    if (exact->parsed())
      return cmd_exact(VoterCountDistribution::parse(dist_literal), p,
                       detail::resolve_policy(policy_literal, m, cap), tail, format, out);
    if (simulate->parsed())
      return cmd_simulate(VoterCountDistribution::parse(dist_literal), p,
                          detail::resolve_policy(policy_literal, m, cap), trials, seed,
                          format, out);
    if (sweep->parsed())
      return cmd_sweep_m(VoterCountDistribution::parse(dist_literal), p, m, m_step, tail,
                         format, out);
    if (weighted->parsed()) {
      std::vector<double> weights;
      if (!weights_literal.empty()) {
        std::stringstream ss(weights_literal);
        std::string item;
        while (std::getline(ss, item, ',')) weights.push_back(std::stod(item));
      }
      return cmd_weighted(weighted_n, p, weights, weighted_samples, seed, format, out);
    }
    if (counter->parsed()) return cmd_counterexample(trials, seed, format, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace votedel::cli
