#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "tmpdir.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "geoknn");
  std::ostringstream out, err;
  const int code = geoknn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string sphere_data() {
  std::string csv = "longitude,latitude\n";
  for (int i = 0; i < 60; ++i) csv += fmt::format("{},{}\n", (i * 37) % 360 - 180, (i * 13) % 170 - 85);
  return testing::write_text("cli_sphere.csv", csv).string();
}

}  // namespace

TEST_CASE("estimate command") {
  const auto data = sphere_data();
  const auto out = testing::tmp_path("cli_est.csv").string();
  auto r = run({"estimate", "--data", data, "--manifold", "sphere:1", "--k", "10", "--grid", "lat-lon:6x12",
                "--output", out, "--seed", "42"});
  CHECK(r.code == 0);
  CHECK(lines(testing::read_text(out)) == 1 + 72);

  r = run({"estimate", "--data", testing::tmp_path("nope.csv").string(), "--manifold", "sphere", "--k", "3",
           "--output", out});
  CHECK(r.code == 3);
  r = run({"estimate", "--data", data, "--manifold", "sphere", "--k", "60", "--output", out});
  CHECK(r.code == 2);
  r = run({"estimate", "--data", data, "--manifold", "torus", "--k", "6", "--output", out});
  CHECK(r.code == 2);
  r = run({"estimate", "--data", data, "--manifold", "sphere", "--k", "5", "--bogus", "--output", out});
  CHECK(r.code == 2);
  r = run({"estimate", "--data", data, "--manifold", "sphere", "--estimator", "fixed", "--bandwidth", "0.4",
           "--grid", "lat-lon:4x8", "--format", "json", "--output", out});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(testing::read_text(out))["count"] == 32);

  const auto grid = testing::write_text("cli_grid.csv", "longitude,latitude\n0,0\n10,10\n").string();
  r = run({"estimate", "--data", data, "--manifold", "sphere", "--k", "5", "--grid", "file:" + grid, "--output", out});
  CHECK(r.code == 0);
  CHECK(lines(testing::read_text(out)) == 3);
}

TEST_CASE("degenerate bandwidth exit code") {
  const auto data = testing::write_text("cli_dup.csv", "longitude,latitude\n0,0\n0,0\n0,0\n50,50\n-70,20\n").string();
  const auto grid = testing::write_text("cli_dup_grid.csv", "longitude,latitude\n0,0\n20,20\n").string();
  const auto out = testing::tmp_path("cli_dup_out.csv").string();
  const auto r = run({"estimate", "--data", data, "--manifold", "sphere", "--k", "2", "--grid", "file:" + grid,
                      "--output", out});
  CHECK(r.code == 4);
  CHECK(r.err.find("1 grid point") != std::string::npos);
  CHECK(lines(testing::read_text(out)) == 3);
}

TEST_CASE("sweep command") {
  const auto a = testing::tmp_path("cli_sweep_a.csv").string();
  const auto b = testing::tmp_path("cli_sweep_b.csv").string();
  const std::vector<std::string> common{"--model", "vmf", "--n", "80", "--reps", "3", "--k-grid", "5,10,20", "--seed", "42"};
  auto args = common;
  args.insert(args.begin(), "sweep");
  args.insert(args.end(), {"--output", a});
  CHECK(run(args).code == 0);
  args.back() = b;
  CHECK(run(args).code == 0);
  CHECK(testing::read_text(a) == testing::read_text(b));
  CHECK(lines(testing::read_text(a)) == 1 + 9);
  CHECK(std::filesystem::exists(testing::tmp_path("cli_sweep_a.json")));

  CHECK(run({"sweep", "--model", "vmf", "--reps", "0", "--output", a}).code == 2);
  CHECK(run({"sweep", "--model", "vmf", "--n", "50", "--k-grid", "50", "--output", a}).code == 2);
  CHECK(run({"sweep", "--model", "nope", "--output", a}).code == 2);

  // Preset echo with an explicit override of the replication count.
  auto r = run({"sweep", "--paper-s5", "--model", "uniform", "--reps", "2", "--output", a});
  CHECK(r.code == 0);
  CHECK(lines(testing::read_text(a)) == 1 + 40);
  const auto summary = nlohmann::json::parse(testing::read_text(testing::tmp_path("cli_sweep_a.json")));
  CHECK(summary["config"]["n"] == 200);
  CHECK(summary["config"]["scaling"] == "paper");

  const auto sample = testing::tmp_path("cli_sample.csv").string();
  r = run({"simulate", "--model", "mardia-sutton", "--n", "25", "--sample-only", "--seed", "42", "--output", sample});
  CHECK(r.code == 0);
  CHECK(testing::read_text(sample).rfind("direction,temperature\n", 0) == 0);
  CHECK(lines(testing::read_text(sample)) == 26);
}

TEST_CASE("diagnose commands") {
  const auto out = testing::tmp_path("cli_cons.json").string();
  auto r = run({"diagnose", "consistency", "--ladder", "200", "--reps", "2", "--lattice", "300", "--seed", "42",
                "--output", out});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(testing::read_text(out));
  CHECK(j["levels"].size() == 1);
  CHECK(run({"diagnose", "consistency", "--k-exponent", "1.2", "--output", out}).code == 2);

  r = run({"diagnose", "normality", "--n", "400", "--reps", "20", "--seed", "42"});
  CHECK(r.code == 0);
  CHECK(r.out.find("KS statistic") != std::string::npos);
  CHECK(r.out.find("skewness") != std::string::npos);
  CHECK(r.out.find("excess kurtosis") != std::string::npos);

  r = run({"diagnose", "normality", "--gamma", "0.7"});
  CHECK(r.code == 2);
  CHECK(r.err.find("4/(d+4)") != std::string::npos);
  CHECK(run({"diagnose"}).code == 2);
}

TEST_CASE("ingest command") {
  const auto in = testing::write_text("cli_wind.csv", "direction,temperature\n10,1\n10,2\n20,3\n500,1\n").string();
  const auto out = testing::tmp_path("cli_wind_out.csv").string();
  auto r = run({"ingest", "--kind", "cylinder", "--input", in, "--jitter", "--seed", "42", "--output", out});
  CHECK(r.code == 0);
  CHECK(r.err.find("line 5") != std::string::npos);
  CHECK(lines(testing::read_text(out)) == 4);
  CHECK(run({"ingest", "--kind", "cylinder", "--input", in + ".missing", "--output", out}).code == 3);
  CHECK(run({"ingest", "--kind", "torus", "--input", in, "--output", out}).code == 2);
}

TEST_CASE("help output") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  r = run({"estimate", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("k/n -> 0") != std::string::npos);
  r = run({"diagnose", "consistency", "--help"});
  CHECK(r.out.find("k_n/log n -> inf") != std::string::npos);
  r = run({"diagnose", "normality", "--help"});
  CHECK(r.out.find("sqrt(k_n n^(-4/(d+4))) -> 0") != std::string::npos);
  r = run({"sweep", "--help"});
  CHECK(r.code == 0);
  CHECK(run({}).code == 2);
}
