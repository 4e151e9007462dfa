#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dagdepth/cli.hpp"

using namespace dagdepth;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;

  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  RunResult r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("help and usage errors") {
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("constants") != std::string::npos);
  CHECK(help.out.find("simulate-dag") != std::string::npos);

  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"simulate-dag"}).code == 1);  // --n required
  CHECK(run({"constants", "--dist", "gauss:1"}).code == 1);
  CHECK(run({"constants", "--format"}).code == 1);
}

TEST_CASE("constants reports the uniform k = 2 rate") {
  const auto r = run({"constants", "--dist", "uniform", "--k", "2"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(std::abs(j.at("lambda_k").get<double>() - 4.311070407) < 1e-6);
  CHECK(j.at("gamma").get<double>() == doctest::Approx(1.0 / 4.311070407).epsilon(1e-8));
  CHECK(j.at("beta").get<double>() == doctest::Approx(0.5));
  CHECK(j.at("alpha").get<double>() == 1.0);
  CHECK(j.at("k") == 2);
}

TEST_CASE("constants scales with the exponential rate and handles dead ends") {
  const auto r = run({"constants", "--dist", "exp:2", "--k", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.json().at("lambda_k").get<double>() ==
        doctest::Approx(2 * 7.080786915).epsilon(1e-8));
  CHECK(r.json().at("beta").get<double>() == doctest::Approx(5.0 / 6.0));

  // Fair Bernoulli with k = 2 has no finite longest-path rate.
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "dagdepth_cli_lattice.json";
  std::ofstream(path) << R"({"kind":"lattice","support":[0.0,1.0],"probs":[0.5,0.5]})";
  const auto b = run({"constants", "--dist", "lattice:" + path.string(), "--k", "2"});
  REQUIRE(b.code == 0);
  CHECK(b.json().at("lambda_k").is_null());
  CHECK(b.json().at("gamma").get<double>() == doctest::Approx(0.0));
  fs::remove(path);
}

TEST_CASE("simulate-dag emits stats and honors the seed") {
  const auto r = run({"simulate-dag", "--n", "1", "--k", "2", "--dist", "uniform", "--seed",
                      "7"});
  REQUIRE(r.code == 0);
  CHECK(r.json().at("d_n") == 1);
  CHECK(r.json().at("min_half") == 1);
  CHECK(r.json().at("max_all") == 1);

  const auto a = run({"simulate-dag", "--n", "500", "--seed", "9"});
  const auto b = run({"simulate-dag", "--n", "500", "--seed", "9"});
  const auto c = run({"simulate-dag", "--n", "500", "--seed", "10"});
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);

  const auto csv = run({"simulate-dag", "--n", "50", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("experiment,n_or_m,k,spec,stat,count,", 0) == 0);
  CHECK(csv.out.find("simulate_dag,50,2,uniform,d_n,1,") != std::string::npos);

  CHECK(run({"simulate-dag", "--n", "0"}).code == 1);
  CHECK(run({"simulate-dag", "--n", "10", "--dist", "power:0.5"}).code == 1);
  CHECK(run({"simulate-dag", "--n", "10", "--format", "yaml"}).code == 1);
}

TEST_CASE("simulate-dag round trips a binary dump") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "dagdepth_cli_dump.bin";
  const auto r = run({"simulate-dag", "--n", "100", "--seed", "3", "--dump", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.json().at("dump") == path.string());
  CHECK(fs::file_size(path) == 20 + 4 * 101);
  fs::remove(path);
}

TEST_CASE("simulate-brw single and replicated runs") {
  const auto one = run({"simulate-brw", "--m", "6", "--dist", "exp:1", "--seed", "4",
                        "--reps", "1", "--witness"});
  REQUIRE(one.code == 0);
  CHECK(one.json().at("min_value").get<double>() > 0.0);
  CHECK(one.json().at("witness").size() == 6);
  CHECK(one.json().at("nodes_visited").get<std::uint64_t>() >= 6);

  const auto many = run({"simulate-brw", "--m", "6", "--dist", "exp:1", "--reps", "64"});
  REQUIRE(many.code == 0);
  CHECK(many.json().at("summary").at("count") == 64);
  CHECK(many.json().at("summary").at("mean").get<double>() > 0.0);

  // Replicated runs are worker-count independent.
  const auto w1 = run({"simulate-brw", "--m", "6", "--reps", "64", "--workers", "1"});
  const auto w4 = run({"simulate-brw", "--m", "6", "--reps", "64", "--workers", "4"});
  CHECK(w1.out == w4.out);

  CHECK(run({"simulate-brw", "--m", "3", "--reps", "0"}).code == 1);
}

TEST_CASE("oracle prints exact fractions and respects budgets") {
  const auto r = run({"oracle", "--n", "2", "--k", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.json().at("mean_dn") == "7/4");
  CHECK(r.json().at("configs") == 4);
  CHECK(r.json().at("dist_dn").at("2") == "3/4");

  // Configuration space of n = 8 blows the default budget: capacity exit.
  CHECK(run({"oracle", "--n", "8", "--k", "2"}).code == 2);
  CHECK(run({"oracle", "--n", "6", "--k", "2", "--budget", "100"}).code == 2);

  const auto csv = run({"oracle", "--n", "3", "--k", "2", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.find("oracle,3,2,uniform,mean_dn,36,") != std::string::npos);
}

TEST_CASE("tails reports rates, writes CSV, and flags underpowered runs") {
  const auto r = run({"tails", "--side", "right", "--eps", "0.3", "--m", "4,6,8", "--dist",
                      "exp:1", "--reps", "2000", "--seed", "12"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j.at("estimate").at("side") == "right");
  CHECK(j.at("estimate").at("theory_rate").get<double>() == doctest::Approx(0.6));
  CHECK(j.at("estimate").at("rows").size() == 3);
  CHECK(j.at("constants").at("gamma").get<double>() ==
        doctest::Approx(0.2319612).epsilon(1e-5));
  CHECK(j.at("config").at("experiment") == "brw_tails");

  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "dagdepth_cli_tails.csv";
  const auto file_run = run({"tails", "--side", "right", "--eps", "0.3", "--m", "2:8:x2",
                             "--dist", "exp:1", "--reps", "3000", "--output", path.string()});
  REQUIRE(file_run.code == 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "experiment,n_or_m,k,spec,stat,count,mean,variance,q05,q25,q50,q75,q95,reference");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3);  // grid 2, 4, 8
  fs::remove(path);

  // Impossible threshold: every row empty, payload on stdout, exit 3.
  const auto under = run({"tails", "--side", "right", "--eps", "9", "--m", "10,14,18",
                          "--dist", "exp:1", "--reps", "100"});
  CHECK(under.code == 3);
  const auto payload = nlohmann::json::parse(under.out);
  CHECK(payload.at("fitted_rate").is_null());
  CHECK(payload.at("rows").size() == 3);
  CHECK_FALSE(under.err.empty());

  // eps >= gamma is invalid on the left side.
  CHECK(run({"tails", "--side", "left", "--eps", "0.5", "--m", "4,6", "--dist", "exp:1"})
            .code == 1);
  CHECK(run({"tails", "--side", "up", "--eps", "0.1", "--m", "4,6"}).code == 1);
}

TEST_CASE("convergence sweeps a grid with both grid syntaxes") {
  const auto r = run({"convergence", "--n", "16,64", "--reps", "10", "--seed", "2"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j.at("rows").size() == 6);
  CHECK(j.at("rows")[0].at("n_or_m") == 16);
  CHECK(j.at("rows")[3].at("n_or_m") == 64);
  CHECK(j.at("rows")[0].at("stat") == "dn_over_logn");
  CHECK(j.at("constants").at("lambda_k").get<double>() ==
        doctest::Approx(4.311070407).epsilon(1e-8));

  const auto geo = run({"convergence", "--n", "16:256:x4", "--reps", "5", "--format", "csv"});
  REQUIRE(geo.code == 0);
  CHECK(geo.out.find("convergence,16,") != std::string::npos);
  CHECK(geo.out.find("convergence,64,") != std::string::npos);
  CHECK(geo.out.find("convergence,256,") != std::string::npos);

  CHECK(run({"convergence", "--n", "64,16", "--reps", "5"}).code == 1);
  CHECK(run({"convergence", "--n", "3.5,4", "--reps", "5"}).code == 1);
  CHECK(run({"convergence", "--n", "16:64:4", "--reps", "5"}).code == 1);
  CHECK(run({"convergence", "--n", "16,64", "--dist", "exp:1"}).code == 1);
}

TEST_CASE("DAGDEPTH_WORKERS overrides the flag") {
  const auto base = run({"convergence", "--n", "32", "--reps", "8", "--format", "csv",
                         "--workers", "1"});
  REQUIRE(base.code == 0);

  setenv("DAGDEPTH_WORKERS", "4", 1);
  const auto overridden = run({"convergence", "--n", "32", "--reps", "8", "--format", "csv",
                               "--workers", "1"});
  CHECK(overridden.code == 0);
  CHECK(overridden.out == base.out);  // same bytes, different workers

  setenv("DAGDEPTH_WORKERS", "banana", 1);
  CHECK(run({"convergence", "--n", "32", "--reps", "8"}).code == 1);
  setenv("DAGDEPTH_WORKERS", "-3", 1);
  CHECK(run({"convergence", "--n", "32", "--reps", "8"}).code == 1);
  unsetenv("DAGDEPTH_WORKERS");
}

TEST_CASE("lattice step specs load from files") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "dagdepth_cli_step.json";
  std::ofstream(path) << R"({"kind":"lattice","support":[0.0,2.0],"probs":[0.25,0.75]})";
  const auto r =
      run({"simulate-brw", "--m", "4", "--dist", "lattice:" + path.string(), "--reps", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.json().at("spec").at("kind") == "lattice");

  std::ofstream(path) << "not json";
  CHECK(run({"simulate-brw", "--m", "4", "--dist", "lattice:" + path.string(), "--reps",
             "1"})
            .code == 1);
  fs::remove(path);
  CHECK(run({"simulate-brw", "--m", "4", "--dist", "lattice:" + path.string(), "--reps",
             "1"})
            .code == 1);
}
