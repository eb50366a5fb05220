#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include <votedel/cli.hpp>

using votedel::cli::run;
using Catch::Matchers::WithinAbs;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json invoke_json(std::vector<std::string> args, int expected_code = 0) {
  auto result = invoke(std::move(args));
  REQUIRE(result.code == expected_code);
  return nlohmann::json::parse(result.out);
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (const char ch : text)
    if (ch == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("table1 reproduces the published values") {
  const auto result = invoke({"table1"});
  CHECK(result.code == 0);
  CHECK(count_lines(result.out) == 7);  // header + 5 rows + summary
  CHECK(result.out.find("pass=1") != std::string::npos);

  const auto j = invoke_json({"table1", "--format", "json"});
  CHECK(j["pass"] == true);
  CHECK(j["rows"].size() == 5);
  CHECK(j["max_abs_delta"].get<double>() <= 5e-6);
  CHECK(j["tolerance"].get<double>() == 5e-6);

  // an absurd tail bound honestly fails the comparison
  const auto loose = invoke({"table1", "--tail", "0.01"});
  CHECK(loose.code == 1);
  CHECK(loose.out.find("pass=0") != std::string::npos);
}

TEST_CASE("exact command evaluates one cell") {
  const auto j = invoke_json({"exact", "--dist", "poisson:20", "--p", "0.6", "--policy",
                              "free:10", "--format", "json"});
  CHECK_THAT(j["value"].get<double>(), WithinAbs(0.7912459130224163, 1e-10));
  CHECK(j["error"].get<double>() <= 1e-9);
  CHECK(j["policy"] == "free:10");
  CHECK(j["method"] == "exact");

  // bare policy names pick up --m / --c
  const auto combined = invoke_json({"exact", "--dist", "poisson:20", "--p", "0.6",
                                     "--policy", "capped", "--m", "5", "--c", "2",
                                     "--format", "json"});
  const auto literal = invoke_json({"exact", "--dist", "poisson:20", "--p", "0.6",
                                    "--policy", "capped:5,2", "--format", "json"});
  CHECK(combined["value"] == literal["value"]);

  const auto csv = invoke({"exact", "--dist", "point:9", "--p", "0.6"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("scenario,", 0) == 0);
  CHECK(count_lines(csv.out) == 2);
}

TEST_CASE("simulate command is seed-deterministic") {
  const std::vector<std::string> args{"simulate", "--dist",  "point:9", "--p",
                                      "0.6",      "--policy", "free:2",  "--trials",
                                      "20000",    "--seed",  "42",      "--format",
                                      "json"};
  const auto first = invoke_json(args);
  const auto second = invoke_json(args);
  CHECK(first["value"] == second["value"]);
  CHECK(first["trials"] == 20000);
  CHECK(first["seed"] == 42);
  CHECK(first["ci95_low"].get<double>() <= first["value"].get<double>());
  CHECK(first["value"].get<double>() <= first["ci95_high"].get<double>());

  // simulation straddles the engine value
  const auto exact = invoke_json({"exact", "--dist", "point:9", "--p", "0.6", "--policy",
                                  "free:2", "--format", "json"});
  const double sigma = first["error"].get<double>();
  CHECK(std::abs(first["value"].get<double>() - exact["value"].get<double>()) <=
        4.0 * sigma);
}

TEST_CASE("sweep command reports the dip") {
  const auto result = invoke({"sweep-m", "--dist", "poisson:20", "--p", "0.6", "--m", "6"});
  CHECK(result.code == 0);
  CHECK(count_lines(result.out) == 9);  // header + m=0..6 + summary
  CHECK(result.out.find("argmin_m=") != std::string::npos);

  const auto j = invoke_json({"sweep-m", "--dist", "poisson:20", "--p", "0.6", "--m", "6",
                              "--format", "json"});
  REQUIRE(j["rows"].size() == 7);
  CHECK(j["rows"][0]["gap_to_conventional"].get<double>() == 0.0);
  CHECK(j["argmin_m"] == 6);  // still descending at the end of this short sweep
  CHECK(j["non_monotone"] == false);
  double prev = 1.0;
  for (const auto& row : j["rows"]) {
    CHECK(row["value"].get<double>() < prev + 1e-15);
    prev = row["value"].get<double>();
  }
}

TEST_CASE("weighted command handles both modes") {
  const auto single = invoke({"weighted", "--p", "0.6", "--weights", "2,0.5,0.5"});
  CHECK(single.code == 0);
  CHECK(single.out.find("0.048") != std::string::npos);

  const auto j = invoke_json({"weighted", "--p", "0.6", "--weights", "2,0.5,0.5",
                              "--format", "json"});
  CHECK_THAT(j["unweighted"].get<double>(), WithinAbs(0.648, 1e-12));
  CHECK_THAT(j["weighted"].get<double>(), WithinAbs(0.6, 1e-12));
  CHECK(j["light_subset_dominates"] == true);

  const auto sampled = invoke_json({"weighted", "--n", "5", "--p", "0.7", "--samples",
                                    "100", "--seed", "7", "--format", "json"});
  CHECK(sampled["violations"] == 0);
  CHECK(sampled["samples"] == 100);
  CHECK(sampled["min_gap"].get<double>() >= -1e-12);
}

TEST_CASE("counterexample command certifies the correlated electorate") {
  const auto j =
      invoke_json({"counterexample", "--trials", "150000", "--seed", "9", "--format",
                   "json"});
  CHECK(j["conventional_exact"] == "3/5");
  CHECK(j["delegated_exact"] == "2/3");
  CHECK(j["exact_match"] == true);
  CHECK(j["ci_covers"] == true);
  CHECK(j["pass"] == true);
  CHECK_THAT(j["estimate"].get<double>(), WithinAbs(2.0 / 3.0, 0.01));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"exact", "--p", "0.6"}).code == 2);  // --dist missing
  CHECK(invoke({"exact", "--dist", "gauss:2", "--p", "0.6"}).code == 2);
  CHECK(invoke({"exact", "--dist", "poisson:20", "--p", "1.0"}).code == 2);
  CHECK(invoke({"exact", "--dist", "poisson:20", "--p", "0.6", "--policy",
                "capped-process:3,2"})
            .code == 2);
  CHECK(invoke({"simulate", "--dist", "poisson:20", "--p", "0.6", "--trials", "0"})
            .code == 2);
  CHECK(invoke({"weighted", "--p", "0.6"}).code == 2);
  CHECK(invoke({"table1", "--format", "yaml"}).code == 2);

  const auto err = invoke({"exact", "--dist", "gauss:2", "--p", "0.6"});
  CHECK(err.err.find("error:") != std::string::npos);
  CHECK(err.out.empty());
}

TEST_CASE("help prints and exits cleanly") {
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("table1") != std::string::npos);
  CHECK(help.out.find("counterexample") != std::string::npos);
}

TEST_CASE("simulate accepts the sequential process policy") {
  const auto j = invoke_json({"simulate", "--dist", "explicit:3=0.5,4=0.5", "--p", "0.6",
                              "--policy", "capped-process:2,2", "--trials", "5000",
                              "--seed", "11", "--format", "json"});
  CHECK(j["policy"] == "capped-process:2,2");
  const double v = j["value"].get<double>();
  CHECK(v > 0.0);
  CHECK(v < 1.0);
}
