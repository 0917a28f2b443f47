#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cusp_spectra/config.hpp"
#include "cusp_spectra/experiments.hpp"

using namespace cusp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "cusp_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig tiny_square() {
  RunConfig c;
  c.experiment = ExperimentKind::square_sanity;
  c.h = 1.0 / 16.0;
  c.count = 6;
  c.quad_points = 3;
  c.tol = 1e-9;
  return c;
}

} // namespace

TEST_CASE("experiment names round trip") {
  for (ExperimentKind k :
       {ExperimentKind::square_sanity, ExperimentKind::lipschitz_rate,
        ExperimentKind::cusp_rate, ExperimentKind::projector_ensemble,
        ExperimentKind::property_p})
    CHECK(experiment_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(experiment_from_string("bogus"), config_error);
}

TEST_CASE("config serialization round trips exactly") {
  RunConfig c;
  c.experiment = ExperimentKind::cusp_rate;
  c.alpha = 0.95;
  c.eps0 = 0.2;
  c.eps_levels = {0.16, 0.08, 0.04, 0.02};
  c.eps_ref = 0.005;
  c.h = 0.037;
  c.grading = 4.0;
  c.quad_points = 7;
  c.count = 60;
  c.tol = 1e-8;
  c.k = 3;
  c.q0 = 0.0;
  c.seed = 987654321012345ull;
  c.out_dir = "runs/cusp";
  c.workers = 3;

  std::istringstream is(serialize_config(c));
  const RunConfig back = parse_config(is);
  CHECK(back == c);

  // comments and blank lines are tolerated
  std::istringstream with_comments(
      "# run description\nexperiment = square_sanity\n\n[discretization]\n"
      "h = 0.1 # coarse\n");
  const RunConfig c2 = parse_config(with_comments);
  CHECK(c2.experiment == ExperimentKind::square_sanity);
  CHECK(c2.h == 0.1);
}

TEST_CASE("config validation rejects bad inputs") {
  RunConfig c = tiny_square();
  validate_config(c);

  RunConfig bad = c;
  bad.h = 0.0;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.k = 0;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.quad_points = 5;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.eps_levels = {0.05, 0.08}; // increasing
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.eps_levels = {0.3}; // above eps0
  CHECK_THROWS_AS(validate_config(bad), config_error);

  RunConfig cusp;
  cusp.experiment = ExperimentKind::cusp_rate;
  cusp.eps_levels = {};
  CHECK_THROWS_AS(validate_config(cusp), config_error);
  cusp.eps_levels = {0.16, 0.08};
  cusp.eps_ref = 0.04; // violates eps >= 4 eps_ref
  CHECK_THROWS_AS(validate_config(cusp), config_error);

  std::istringstream unknown("nonsense = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), config_error);
  std::istringstream badnum("[discretization]\nh = abc\n");
  CHECK_THROWS_AS(parse_config(badnum), config_error);
  std::istringstream badlist("[geometry]\neps_levels = 0.1, 0.2\n");
  CHECK_THROWS_AS(parse_config(badlist), config_error);
}

TEST_CASE("square sanity run produces the reports") {
  RunConfig c = tiny_square();
  c.out_dir = fresh_dir("square_run").string();
  CHECK(run_experiment(c) == 0);
  const std::string csv = slurp(fs::path(c.out_dir) / "report.csv");
  REQUIRE(!csv.empty());
  std::istringstream is(csv);
  std::string header;
  std::getline(is, header);
  CHECK(header == "n,lambda,analytic,rel_err");
  int rows = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == c.count);
  CHECK(fs::exists(fs::path(c.out_dir) / "report.svg"));
  CHECK(fs::exists(fs::path(c.out_dir) / "summary.txt"));
  const std::string svg = slurp(fs::path(c.out_dir) / "report.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("reruns are bitwise identical and reuse the cache") {
  RunConfig a = tiny_square();
  a.out_dir = fresh_dir("det_a").string();
  RunConfig b = tiny_square();
  b.out_dir = fresh_dir("det_b").string();
  REQUIRE(run_experiment(a) == 0);
  REQUIRE(run_experiment(b) == 0);
  CHECK(slurp(fs::path(a.out_dir) / "report.csv") ==
        slurp(fs::path(b.out_dir) / "report.csv"));
  CHECK(slurp(fs::path(a.out_dir) / "report.svg") ==
        slurp(fs::path(b.out_dir) / "report.svg"));

  // idempotent rerun in place: cache hit, identical bytes
  const std::string before = slurp(fs::path(a.out_dir) / "report.csv");
  REQUIRE(fs::exists(fs::path(a.out_dir) / "cache"));
  REQUIRE(run_experiment(a) == 0);
  CHECK(slurp(fs::path(a.out_dir) / "report.csv") == before);
  const std::string summary = slurp(fs::path(a.out_dir) / "summary.txt");
  CHECK(summary.find("cache: hit") != std::string::npos);
}

TEST_CASE("lipschitz micro run fits a rate") {
  RunConfig c;
  c.experiment = ExperimentKind::lipschitz_rate;
  c.eps_levels = {0.1, 0.05, 0.025};
  c.h = 1.0 / 12.0;
  c.count = 8;
  c.k = 2;
  c.tol = 1e-7;
  c.quad_points = 7;
  c.out_dir = fresh_dir("lipschitz_micro").string();
  const LipschitzArtifacts art = run_lipschitz_rate(c, c.out_dir);
  CHECK(art.t.size() == 3);
  CHECK(art.fit.slope > 0.0);
  const std::string csv = slurp(fs::path(c.out_dir) / "report.csv");
  CHECK(csv.find("fit,") != std::string::npos);
}

TEST_CASE("invalid config returns a nonzero status") {
  RunConfig c = tiny_square();
  c.h = -1.0;
  CHECK(run_experiment(c) != 0);
}
