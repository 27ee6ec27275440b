#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wbary/cli.hpp"
#include "wbary/generators.hpp"
#include "wbary/io.hpp"

#include "test_support.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

using namespace wbary;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json slurp_json(const std::filesystem::path& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("pairwise run writes the derived instance result") {
  test::TempDir dir("cli_pairwise");
  Problem problem = gen_sharpness_instance(2, CostExponent::p2);
  save_measure_json(problem.measures[0], dir.path() / "m1.json");
  save_measure_json(problem.measures[1], dir.path() / "m2.json");

  const auto out_path = (dir.path() / "result.json").string();
  CliResult result = run_cli({"barycenter", "--method", "pairwise", "--p", "2",
                              (dir.path() / "m1.json").string(),
                              (dir.path() / "m2.json").string(), "-o", out_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(out_path);
  CHECK(doc.at("eta").get<double>() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(doc.at("objective").get<double>() == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(doc.at("lower_bound").get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(doc.at("method").get<std::string>() == "pairwise");
  CHECK(doc.at("format").get<int>() == 1);
  CHECK(result.out.find("objective") != std::string::npos);
  CHECK(result.out.find("wall time") != std::string::npos);
}

TEST_CASE("reference run on identical inputs reports zero objective") {
  test::TempDir dir("cli_identical");
  Rng rng(301);
  DiscreteMeasure mu = test::random_measure(rng, 4, 2);
  save_measure_json(mu, dir.path() / "a.json");
  save_measure_json(mu, dir.path() / "b.json");
  const auto out_path = (dir.path() / "r.json").string();
  CliResult result = run_cli({"barycenter", "--method", "reference", "--p", "2",
                              (dir.path() / "a.json").string(),
                              (dir.path() / "b.json").string(), "-o", out_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(out_path);
  CHECK(doc.at("objective").get<double>() <= 1e-12);
  CHECK(doc.at("degenerate_bound").get<bool>());
}

TEST_CASE("generated worst-case instance through the reference method") {
  test::TempDir dir("cli_gen");
  const auto out_path = (dir.path() / "r.json").string();
  CliResult result = run_cli({"barycenter", "--gen", "sharpness", "--n", "5", "--p", "1",
                              "--method", "reference", "-o", out_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(out_path);
  CHECK(doc.at("objective").get<double>() == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("dist prints both the power and the distance") {
  test::TempDir dir("cli_dist");
  Problem problem = gen_sharpness_instance(2, CostExponent::p2);
  save_measure_json(problem.measures[0], dir.path() / "a.json");
  save_measure_json(problem.measures[1], dir.path() / "b.json");
  CliResult result = run_cli({"dist", "--p", "2", (dir.path() / "a.json").string(),
                              (dir.path() / "b.json").string()});
  REQUIRE(result.code == 0);
  CHECK(result.out.find("W_p^p: 1") != std::string::npos);
  CHECK(result.out.find("W_p:   1") != std::string::npos);
}

TEST_CASE("plan export matches the schema") {
  test::TempDir dir("cli_plan");
  Problem problem = gen_sharpness_instance(2, CostExponent::p2);
  save_measure_json(problem.measures[0], dir.path() / "a.json");
  save_measure_json(problem.measures[1], dir.path() / "b.json");
  const auto plan_path = (dir.path() / "plan.json").string();
  CliResult result = run_cli({"dist", (dir.path() / "a.json").string(),
                              (dir.path() / "b.json").string(), "--plan", plan_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(plan_path);
  CHECK(doc.at("cost").get<double>() == doctest::Approx(1.0));
  REQUIRE(doc.at("entries").size() == 2);
  CHECK(doc.at("entries")[0][2].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("outputs are byte-identical across reruns") {
  test::TempDir dir("cli_determinism");
  const auto first = (dir.path() / "a.json").string();
  const auto second = (dir.path() / "b.json").string();
  for (const auto& path : {first, second}) {
    CliResult result = run_cli({"barycenter", "--gen", "disk", "--n", "3", "--atoms", "10",
                                "--seed", "7", "--p", "2", "-o", path});
    REQUIRE(result.code == 0);
  }
  CHECK(slurp(first) == slurp(second));
}

TEST_CASE("sweep with one vector equals the single run") {
  test::TempDir dir("cli_sweep1");
  CliResult sweep = run_cli({"sweep", "--gen", "disk", "--n", "3", "--atoms", "8", "--seed", "3",
                             "--lambdas", "0.2,0.3,0.5", "--out-dir",
                             (dir.path() / "sw").string()});
  REQUIRE(sweep.code == 0);
  CliResult single = run_cli({"barycenter", "--method", "pairwise", "--gen", "disk", "--n", "3",
                              "--atoms", "8", "--seed", "3", "--weights", "0.2,0.3,0.5", "-o",
                              (dir.path() / "single.json").string()});
  REQUIRE(single.code == 0);
  CHECK(slurp(dir.path() / "sw" / "result_000.json") == slurp(dir.path() / "single.json"));
}

TEST_CASE("sweep over random weights keeps eta within the contract") {
  test::TempDir dir("cli_sweep_eta");
  Rng rng(302);
  std::string lambdas;
  for (int k = 0; k < 10; ++k) {
    if (k > 0) lambdas += ";";
    for (int i = 0; i < 3; ++i)
      lambdas += (i > 0 ? "," : "") + std::to_string(rng.uniform(0.1, 1.0));
  }
  CliResult sweep = run_cli({"sweep", "--gen", "disk", "--n", "3", "--atoms", "8", "--seed", "11",
                             "--lambdas", lambdas, "--out-dir", (dir.path() / "sw").string()});
  REQUIRE(sweep.code == 0);
  for (int k = 0; k < 10; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "result_%03d.json", k);
    const json doc = slurp_json(dir.path() / "sw" / name);
    const double eta = doc.at("eta").get<double>();
    CHECK(eta >= 1.0);
    CHECK(eta <= 2.0);
  }
}

TEST_CASE("bilinear grid sweep needs four inputs and clamps the corners") {
  test::TempDir dir("cli_grid");
  CliResult wrong = run_cli({"sweep", "--gen", "disk", "--n", "3", "--atoms", "6", "--grid", "2",
                             "--out-dir", (dir.path() / "bad").string()});
  CHECK(wrong.code == 1);

  CliResult grid = run_cli({"sweep", "--gen", "disk", "--n", "4", "--atoms", "6", "--seed", "2",
                            "--grid", "2", "--out-dir", (dir.path() / "sw").string()});
  REQUIRE(grid.code == 0);
  // Corner vector ~ e_1: the barycenter essentially reproduces input one.
  const json doc = slurp_json(dir.path() / "sw" / "result_000.json");
  CHECK(doc.at("objective").get<double>() <= 1e-6);
}

TEST_CASE("compare table on the worst-case instance") {
  test::TempDir dir("cli_compare");
  const auto csv_path = (dir.path() / "table.csv").string();
  CliResult result = run_cli({"compare", "--gen", "sharpness", "--n", "4", "--p", "2", "--oracle",
                              "-o", csv_path});
  REQUIRE(result.code == 0);
  const std::string csv = slurp(csv_path);
  CHECK(csv.find("method,objective,ratio,ratio_basis,eta,wall_seconds") != std::string::npos);
  CHECK(csv.find("reference,0.75,4,oracle") != std::string::npos);
  CHECK(csv.find("pairwise,0.328125,1.75,oracle") != std::string::npos);
  CHECK(csv.find("exact-oracle,0.1875,1,oracle") != std::string::npos);
}

TEST_CASE("compare on identical inputs flags degeneracy") {
  test::TempDir dir("cli_compare_deg");
  Rng rng(303);
  DiscreteMeasure mu = test::random_measure(rng, 3, 2);
  save_measure_json(mu, dir.path() / "a.json");
  save_measure_json(mu, dir.path() / "b.json");
  const auto csv_path = (dir.path() / "table.csv").string();
  CliResult result = run_cli({"compare", (dir.path() / "a.json").string(),
                              (dir.path() / "b.json").string(), "-o", csv_path});
  REQUIRE(result.code == 0);
  const std::string csv = slurp(csv_path);
  CHECK(csv.find("degenerate") != std::string::npos);
  CHECK(csv.find("reference") != std::string::npos);
}

TEST_CASE("plot emits one circle per atom with equal radii for equal masses") {
  test::TempDir dir("cli_plot");
  Matrix pts(4, 2);
  pts << 0, 0, 1, 0, 0, 1, 1, 1;
  DiscreteMeasure uniform(pts, Vector::Constant(4, 0.25));
  save_measure_json(uniform, dir.path() / "m.json");
  const auto svg_path = (dir.path() / "m.svg").string();
  CliResult result = run_cli({"plot", (dir.path() / "m.json").string(), "-o", svg_path});
  REQUIRE(result.code == 0);
  const std::string svg = slurp(svg_path);
  std::size_t circles = 0, pos = 0;
  std::string radius;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) {
    ++circles;
    const std::size_t r = svg.find("r=\"", pos) + 3;
    const std::string value = svg.substr(r, svg.find('"', r) - r);
    if (radius.empty()) radius = value;
    CHECK(value == radius);
    ++pos;
  }
  CHECK(circles == 4);

  // One-dimensional results cannot be plotted.
  Problem line = gen_sharpness_instance(2, CostExponent::p2);
  save_measure_json(line.measures[0], dir.path() / "line.json");
  CliResult bad = run_cli({"plot", (dir.path() / "line.json").string(), "-o", svg_path});
  CHECK(bad.code == 1);

  std::ofstream(dir.path() / "empty.json") << "{\"d\":2,\"points\":[],\"weights\":[]}";
  CliResult empty = run_cli({"plot", (dir.path() / "empty.json").string(), "-o", svg_path});
  CHECK(empty.code == 1);
}

TEST_CASE("gen writes loadable files") {
  test::TempDir dir("cli_genfiles");
  CliResult result = run_cli({"gen", "ellipses", "--n", "3", "--resolution", "24", "--seed", "4",
                              "--out-dir", (dir.path() / "inst").string(), "--pgm"});
  REQUIRE(result.code == 0);
  for (int i = 0; i < 3; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "m_%02d.pgm", i);
    DiscreteMeasure mu = load_measure(dir.path() / "inst" / name);
    CHECK(mu.size() > 0);
  }
}

TEST_CASE("pgm rasters feed the pipeline end to end") {
  test::TempDir dir("cli_pgm");
  CliResult gen = run_cli({"gen", "ellipses", "--n", "2", "--resolution", "20", "--seed", "8",
                           "--out-dir", (dir.path() / "img").string(), "--pgm"});
  REQUIRE(gen.code == 0);
  const auto out_path = (dir.path() / "r.json").string();
  const auto svg_path = (dir.path() / "r.svg").string();
  CliResult result = run_cli({"barycenter", "--method", "pairwise", "--p", "2",
                              (dir.path() / "img" / "m_00.pgm").string(),
                              (dir.path() / "img" / "m_01.pgm").string(), "-o", out_path,
                              "--svg", svg_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(out_path);
  CHECK(doc.at("eta").get<double>() >= 1.0);
  CHECK(doc.at("eta").get<double>() <= 2.0);
  CHECK(slurp(svg_path).find("<circle") != std::string::npos);
}

TEST_CASE("exit codes distinguish input and solver failures") {
  CliResult missing = run_cli({"barycenter", "missing_a.json", "missing_b.json"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error") != std::string::npos);

  CliResult unknown = run_cli({"no-such-command"});
  CHECK(unknown.code == 1);

  test::TempDir dir("cli_exit2");
  CliResult starved = run_cli({"barycenter", "--gen", "disk", "--n", "3", "--atoms", "12",
                               "--method", "pairwise", "--max-pivots", "1", "-o",
                               (dir.path() / "r.json").string()});
  CHECK(starved.code == 2);
  CHECK(starved.err.find("solver error") != std::string::npos);
}

TEST_CASE("exact oracle method through the cli") {
  test::TempDir dir("cli_oracle");
  const auto out_path = (dir.path() / "r.json").string();
  CliResult result = run_cli({"barycenter", "--gen", "sharpness", "--n", "4", "--p", "2",
                              "--method", "exact-oracle", "-o", out_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(out_path);
  CHECK(doc.at("objective").get<double>() == doctest::Approx(0.1875).epsilon(1e-9));
  CHECK(doc.at("eta").get<double>() == 1.0);

  CliResult hidden = run_cli({"oracle", "--gen", "sharpness", "--n", "3", "--p", "1", "-o",
                              (dir.path() / "o.json").string()});
  REQUIRE(hidden.code == 0);
  CHECK(slurp_json(dir.path() / "o.json").at("objective").get<double>() ==
        doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("fixed-point method records its objective trace") {
  test::TempDir dir("cli_fp");
  const auto out_path = (dir.path() / "r.json").string();
  CliResult result = run_cli({"barycenter", "--gen", "disk", "--n", "3", "--atoms", "8", "--seed",
                              "5", "--method", "fixed-point", "--rounds", "4", "--init",
                              "mixture", "-o", out_path});
  REQUIRE(result.code == 0);
  const json doc = slurp_json(out_path);
  CHECK(doc.at("method").get<std::string>() == "fixed-point");
  const auto trace = doc.at("objective_trace");
  REQUIRE(trace.size() >= 2);
  for (std::size_t r = 1; r < trace.size(); ++r)
    CHECK(trace[r].get<double>() <= trace[r - 1].get<double>() + 1e-9);
  CHECK(doc.at("objective").get<double>() == trace.back().get<double>());
  // Mixture start: the certified multiplier of the final measure.
  CHECK(doc.at("lower_bound").get<double>() ==
        doctest::Approx(0.5 * trace.front().get<double>()).epsilon(1e-12));

  // Arbitrary file initializations carry no certificate: eta is null.
  Problem problem = gen_unit_disk_cloud(3, 8, 5);
  save_measure_json(problem.measures[0], dir.path() / "init.json");
  CliResult from_file = run_cli({"barycenter", "--gen", "disk", "--n", "3", "--atoms", "8",
                                 "--seed", "5", "--method", "fixed-point", "--init",
                                 (dir.path() / "init.json").string(), "-o", out_path});
  REQUIRE(from_file.code == 0);
  CHECK(slurp_json(out_path).at("eta").is_null());
}

TEST_CASE("swap variant is rejected for p=2") {
  CliResult result = run_cli({"barycenter", "--gen", "sharpness", "--n", "3", "--p", "2",
                              "--plan-cost", "c2", "-o", "/tmp/never.json"});
  CHECK(result.code == 1);
}
