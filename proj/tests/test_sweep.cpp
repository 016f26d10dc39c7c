#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netlimits/sweep.hpp"
#include "test_util.hpp"

using namespace netlimits;

namespace {

ExperimentConfig sbm_config(const char* extra_json = "") {
  std::string text = R"({
    "model": {"kind": "sbm", "p": 0.6, "q": 0.3},
    "n": 8,
    "sweep": [{"param": "p", "values": [0.45, 0.6, 0.9]}],
    "trials": 40,
    "seed": 7)" + std::string(extra_json) + "}";
  return config_from_json(OrderedJson::parse(text));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::size_t column_index(const SweepResult& r, const std::string& name) {
  for (std::size_t c = 0; c < r.columns.size(); ++c) {
    if (r.columns[c] == name) return c;
  }
  throw std::runtime_error("missing column " + name);
}

}  // namespace

TEST_CASE("wilson interval basics") {
  const auto w = wilson_interval(30, 100);
  CHECK(w.lo < 0.3);
  CHECK(w.hi > 0.3);
  CHECK(w.lo >= 0.0);
  CHECK(w.hi <= 1.0);
  const auto zero = wilson_interval(0, 50);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi > 0.0);
  const auto all = wilson_interval(50, 50);
  CHECK(all.hi == 1.0);
  CHECK_THROWS_AS(wilson_interval(1, 0), RangeError);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 12638187200555641996ull);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[{"param":"p","values":[0.5]}],"trials":1,"seed":1,"typo":1})")),
                  ParseError);
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3,"zz":1},"n":8,"sweep":[{"param":"p","values":[0.5]}],"trials":1,"seed":1})")),
                  ParseError);
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[{"param":"p","values":[0.5],"x":1}],"trials":1,"seed":1})")),
                  ParseError);
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[],"trials":1,"seed":1})")),
                  RangeError);
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[{"param":"beta","values":[0.5]}],"trials":1,"seed":1})")),
                  RangeError);
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[{"param":"p","values":[0.5]}],"trials":0,"seed":1})")),
                  RangeError);
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[{"param":"p","values":[0.5]}],"trials":1,"seed":1,"metrics":["recovery","zz"]})")),
                  ParseError);
  // mean_in_degree only applies to directed models
  CHECK_THROWS_AS(config_from_json(OrderedJson::parse(
                      R"({"model":{"kind":"sbm","p":0.6,"q":0.3},"n":8,"sweep":[{"param":"p","values":[0.5]}],"trials":1,"seed":1,"metrics":["mean_in_degree"]})")),
                  RangeError);
}

TEST_CASE("sbm sweep column schema matches the documented order") {
  const auto cfg = sbm_config();
  const auto result = run_sweep(cfg);
  const std::string header = sweep_to_csv(result).substr(0, sweep_to_csv(result).find('\n'));
  CHECK(header ==
        "p,q,n,lhs,rhs,nonrecoverable,exact_err,exact_err_lo,exact_err_hi,"
        "flip_err,flip_err_lo,flip_err_hi,trials,seconds");
  CHECK(result.rows.size() == 3);
}

TEST_CASE("sweep is deterministic except for wall time") {
  auto cfg = sbm_config();
  cfg.axes[0].values = {0.6};
  cfg.trials = 5;
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  REQUIRE(a.columns == b.columns);
  const std::size_t seconds = column_index(a, "seconds");
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
      if (c == seconds) continue;
      CHECK(detail::sweep_value_string(a.rows[r][c]) == detail::sweep_value_string(b.rows[r][c]));
    }
  }
}

TEST_CASE("exact error rate never drops below one half") {
  // global flip symmetry forces a coin flip on the labeling sign
  const auto result = run_sweep(sbm_config());
  const std::size_t exact = column_index(result, "exact_err");
  const std::size_t flip = column_index(result, "flip_err");
  for (const auto& row : result.rows) {
    REQUIRE(std::get<double>(row[exact]) >= 0.5);
  }
  // flip error shrinks as p pulls away from q
  CHECK(std::get<double>(result.rows.front()[flip]) >= std::get<double>(result.rows.back()[flip]));
}

TEST_CASE("single cell rerun in isolation reproduces its aggregate") {
  const auto full = run_sweep(sbm_config());
  auto single = sbm_config();
  single.axes[0].values = {0.6};  // the middle cell
  const auto alone = run_sweep(single);
  REQUIRE(full.columns == alone.columns);
  const std::size_t seconds = column_index(full, "seconds");
  for (std::size_t c = 0; c < full.columns.size(); ++c) {
    if (c == seconds) continue;
    CHECK(detail::sweep_value_string(full.rows[1][c]) ==
          detail::sweep_value_string(alone.rows[0][c]));
  }
}

TEST_CASE("cell failures are isolated into the error column") {
  auto cfg = sbm_config();
  cfg.axes[0].values = {0.2, 0.6};  // p = 0.2 < q violates the model
  const auto result = run_sweep(cfg);
  REQUIRE(result.columns.back() == "error");
  REQUIRE(result.rows.size() == 2);
  const auto& bad = result.rows[0];
  const auto& good = result.rows[1];
  CHECK(detail::sweep_value_string(bad.back()).find("q<p") != std::string::npos);
  CHECK(std::holds_alternative<std::monostate>(bad[column_index(result, "exact_err")]));
  CHECK(std::holds_alternative<std::monostate>(good.back()));
  CHECK(std::get<double>(good[column_index(result, "exact_err")]) >= 0.5);
}

TEST_CASE("dpam sweep carries the in-degree metric") {
  const auto cfg = config_from_json(OrderedJson::parse(R"({
    "model": {"kind": "dpam", "m": 3, "s": 1},
    "n": 40,
    "sweep": [{"param": "s", "values": [0.5, 1, 4]}],
    "trials": 200,
    "seed": 11,
    "metrics": ["mean_in_degree"]
  })"));
  const auto result = run_sweep(cfg);
  const std::size_t mean_col = column_index(result, "mean_in_degree");
  const std::size_t se_col = column_index(result, "mean_in_degree_se");
  for (const auto& row : result.rows) {
    const double mean = std::get<double>(row[mean_col]);
    const double se = std::get<double>(row[se_col]);
    REQUIRE(std::abs(mean - 3.0) <= 3.0 * se);
  }
}

TEST_CASE("mi metric fills both columns for enumerable specs") {
  const auto cfg = config_from_json(OrderedJson::parse(R"({
    "model": {"kind": "sbm", "p": 0.6, "q": 0.3},
    "n": 3,
    "sweep": [{"param": "p", "values": [0.5, 0.7]}],
    "trials": 1,
    "seed": 3,
    "metrics": ["mi"]
  })"));
  const auto result = run_sweep(cfg);
  const std::size_t mi_col = column_index(result, "mi");
  const std::size_t up_col = column_index(result, "mi_upper");
  for (const auto& row : result.rows) {
    REQUIRE(std::get<double>(row[mi_col]) <= std::get<double>(row[up_col]) + 1e-12);
  }
}

TEST_CASE("csv round-trips to printed precision") {
  const auto result = run_sweep(sbm_config());
  const std::string csv = sweep_to_csv(result);
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  const auto header = split_csv_line(line);
  REQUIRE(header == result.columns);
  std::size_t row_idx = 0;
  while (std::getline(ss, line)) {
    const auto fields = split_csv_line(line);
    REQUIRE(fields.size() == result.columns.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& v = result.rows[row_idx][c];
      if (std::holds_alternative<double>(v)) {
        // reparse and reformat: lands on the same 9-significant-digit string
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", std::stod(fields[c]));
        CHECK(fields[c] == buf);
      }
    }
    ++row_idx;
  }
  REQUIRE(row_idx == result.rows.size());
}

TEST_CASE("csv and json files are written and bad paths fail loudly") {
  const auto result = run_sweep(sbm_config());
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv_path = (dir / "netlimits_test_sweep.csv").string();
  const auto json_path = (dir / "netlimits_test_sweep.json").string();
  emit_csv(result, csv_path);
  emit_json(result, json_path);
  std::ifstream csv_in(csv_path);
  std::string first;
  std::getline(csv_in, first);
  CHECK(first.rfind("p,q,n,", 0) == 0);
  std::ifstream json_in(json_path);
  std::stringstream buf;
  buf << json_in.rdbuf();
  const auto parsed = OrderedJson::parse(buf.str());
  CHECK(parsed.is_array());
  CHECK(parsed.size() == result.rows.size());
  std::filesystem::remove(csv_path);
  std::filesystem::remove(json_path);
  CHECK_THROWS_AS(emit_csv(result, "/nonexistent-dir/x.csv"), IOError);
}

TEST_CASE("trial counts add up") {
  const auto cfg = sbm_config();
  const auto result = run_sweep(cfg);
  const std::size_t trials_col = column_index(result, "trials");
  std::int64_t total = 0;
  for (const auto& row : result.rows) total += std::get<std::int64_t>(row[trials_col]);
  CHECK(total == static_cast<std::int64_t>(cfg.trials * result.rows.size()));
}
