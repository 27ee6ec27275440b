#include "wbary/cli.hpp"

#include "wbary/barycenter.hpp"
#include "wbary/generators.hpp"
#include "wbary/io.hpp"
#include "wbary/oracle.hpp"
#include "wbary/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace wbary::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Options shared by every subcommand that assembles a problem.
struct ProblemSpec {
  std::vector<std::string> inputs;
  std::string gen;
  int gen_n = 10;
  int gen_atoms = 50;
  int gen_resolution = 60;
  std::uint64_t seed = 1;
  std::string weights_text;
  int p_value = 2;
};

void add_problem_options(CLI::App* cmd, ProblemSpec& spec, bool with_inputs = true) {
  if (with_inputs)
    cmd->add_option("inputs", spec.inputs, "measure files (.json, .csv or .pgm)");
  cmd->add_option("--gen", spec.gen, "synthetic instance instead of files: sharpness|disk|ellipses")
      ->check(CLI::IsMember({"sharpness", "disk", "ellipses"}));
  cmd->add_option("--n", spec.gen_n, "number of generated measures (default 10)");
  cmd->add_option("--atoms", spec.gen_atoms, "atoms per generated disk cloud (default 50)");
  cmd->add_option("--resolution", spec.gen_resolution,
                  "raster resolution of generated ellipses (default 60)");
  cmd->add_option("--seed", spec.seed, "seed for the generators (default 1)");
  cmd->add_option("--weights", spec.weights_text,
                  "comma separated barycenter weights; zero entries are clamped to 1e-9 and the "
                  "vector renormalized (default uniform)");
  cmd->add_option("--p", spec.p_value, "cost exponent, 1 or 2 (default 2)")
      ->check(CLI::IsMember({1, 2}));
}

Weights assemble_weights(const std::string& text, Index n) {
  if (text.empty()) return Weights::uniform(n);
  std::vector<double> values;
  std::stringstream stream(text);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ValidationError("cannot parse weight entry '" + cell + "'");
    }
  }
  if (static_cast<Index>(values.size()) != n)
    throw ValidationError("got " + std::to_string(values.size()) + " weights for " +
                          std::to_string(n) + " measures");
  Vector lambda(n);
  for (Index i = 0; i < n; ++i) {
    if (values[static_cast<std::size_t>(i)] < 0.0)
      throw ValidationError("weights must be nonnegative");
    // The weight simplex is open; exact zeros are clamped.
    lambda[i] = std::max(values[static_cast<std::size_t>(i)], 1e-9);
  }
  return Weights(lambda);
}

Problem assemble_problem(const ProblemSpec& spec) {
  const CostExponent p = cost_exponent_from_int(spec.p_value);
  if (!spec.gen.empty()) {
    Problem problem = spec.gen == "sharpness" ? gen_sharpness_instance(spec.gen_n, p)
                      : spec.gen == "disk"
                          ? gen_unit_disk_cloud(spec.gen_n, spec.gen_atoms, spec.seed)
                          : gen_nested_ellipses(spec.gen_n, spec.gen_resolution, spec.seed);
    problem.p = p;
    if (!spec.weights_text.empty())
      problem.weights =
          assemble_weights(spec.weights_text, static_cast<Index>(problem.measures.size()));
    return problem;
  }
  if (spec.inputs.size() < 2)
    throw ValidationError("need at least two input measures (or --gen)");
  std::vector<DiscreteMeasure> measures;
  measures.reserve(spec.inputs.size());
  for (const auto& path : spec.inputs) measures.push_back(load_measure(path));
  Weights weights =
      assemble_weights(spec.weights_text, static_cast<Index>(measures.size()));
  return make_problem(std::move(measures), std::move(weights), p);
}

json measure_json(const DiscreteMeasure& measure) {
  json doc;
  doc["format"] = 1;
  doc["d"] = measure.dim();
  json points = json::array();
  json weights = json::array();
  for (Index k = 0; k < measure.size(); ++k) {
    json row = json::array();
    for (Index j = 0; j < measure.dim(); ++j) row.push_back(measure.points()(k, j));
    points.push_back(std::move(row));
    weights.push_back(measure.weights()[k]);
  }
  doc["points"] = std::move(points);
  doc["weights"] = std::move(weights);
  return doc;
}

const char* method_name(Method method) {
  switch (method) {
    case Method::Reference:
      return "reference";
    case Method::Pairwise:
      return "pairwise";
    case Method::FixedPoint:
      return "fixed-point";
    case Method::ExactOracle:
      return "exact-oracle";
  }
  return "unknown";
}

json result_json(const BarycenterResult& result) {
  json doc = measure_json(result.measure);
  doc["objective"] = result.objective;
  doc["lower_bound"] = result.bounds.lower_bound;
  if (std::isfinite(result.bounds.eta_adapted))
    doc["eta"] = result.bounds.eta_adapted;
  else
    doc["eta"] = nullptr;
  doc["eta_raw"] = result.bounds.eta_adapted_raw;
  doc["eta_worst_case"] = result.bounds.eta_worst_case;
  doc["degenerate_bound"] = result.bounds.degenerate;
  doc["method"] = method_name(result.method);
  doc["p"] = exponent(result.p);
  doc["eps"] = result.eps;
  if (result.ref_index >= 0) doc["ref_index"] = result.ref_index;
  if (result.bounds.pairwise_costs.size() > 0) {
    json costs = json::array();
    for (Index i = 0; i < result.bounds.pairwise_costs.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < result.bounds.pairwise_costs.cols(); ++j)
        row.push_back(result.bounds.pairwise_costs(i, j));
      costs.push_back(std::move(row));
    }
    doc["pairwise_costs"] = std::move(costs);
  }
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + path.string());
  file << text;
  if (!file) throw ValidationError("write failure on " + path.string());
}

void print_result(std::ostream& out, const BarycenterResult& result, double wall_seconds) {
  out << "objective:   " << result.objective << "\n";
  out << "lower bound: " << result.bounds.lower_bound << "\n";
  if (std::isfinite(result.bounds.eta_adapted))
    out << "eta:         " << result.bounds.eta_adapted
        << (result.bounds.degenerate ? " (degenerate: identical inputs)" : "") << "\n";
  else
    out << "eta:         n/a (uncertified initialization)\n";
  out << "wall time:   " << wall_seconds << " s\n";
}

struct BarycenterCmd {
  ProblemSpec spec;
  std::string method = "pairwise";
  int ref_index = -1;
  double eps = 1e-6;
  std::string plan_cost = "match-p";
  int rounds = 5;
  std::string init = "ref";
  std::string out_path = "result.json";
  std::string svg_path;
  long max_pivots = 0;
};

BarycenterOptions make_options(const BarycenterCmd& cmd) {
  BarycenterOptions options;
  options.eps = cmd.eps;
  options.ot.max_pivots = cmd.max_pivots;
  if (cmd.plan_cost == "c2") {
    if (cmd.spec.p_value != 1)
      throw ValidationError("--plan-cost c2 is the swap variant for --p 1 runs only");
    options.plan_cost = PlanCost::SquaredEuclidean;
  }
  return options;
}

BarycenterResult run_fixed_point(const Problem& problem, const BarycenterCmd& cmd,
                                 const BarycenterOptions& options, json& extra) {
  DiscreteMeasure init = [&] {
    if (cmd.init == "mixture") return mixture(problem);
    if (cmd.init == "ref") {
      const int j = cmd.ref_index >= 0 ? cmd.ref_index : default_ref_index(problem.weights);
      if (j < 0 || j >= static_cast<int>(problem.measures.size()))
        throw ValidationError("reference index out of range");
      return problem.measures[static_cast<std::size_t>(j)];
    }
    return load_measure(cmd.init);
  }();

  auto history = fixed_point_iterate(problem, init, cmd.rounds, options);
  const auto& [final_measure, final_objective] = history.back();

  BarycenterResult result{final_measure, final_objective, Method::FixedPoint, problem.p,
                          -1,            cmd.eps,          {}};
  const int rounds_run = static_cast<int>(history.size()) - 1;
  const double eps_growth =
      problem.p == CostExponent::p1 ? std::pow(1.0 + cmd.eps, rounds_run) : 1.0;
  if (cmd.init == "ref") {
    const int j = cmd.ref_index >= 0 ? cmd.ref_index : default_ref_index(problem.weights);
    result.ref_index = j;
    result.bounds.lower_bound = problem.weights[j] * history.front().second;
    result.bounds.eta_worst_case = eps_growth / problem.weights[j];
  } else if (cmd.init == "mixture") {
    result.bounds.lower_bound = 0.5 * history.front().second;
    result.bounds.eta_worst_case = 2.0 * eps_growth;
  } else {
    // No a-priori relation between an arbitrary start and the optimum.
    result.bounds.lower_bound = 0.0;
    result.bounds.eta_worst_case = std::numeric_limits<double>::infinity();
  }
  if (result.bounds.lower_bound > 1e-15) {
    result.bounds.eta_adapted = std::max(1.0, final_objective / result.bounds.lower_bound);
    result.bounds.eta_adapted_raw = result.bounds.eta_adapted;
  } else if (cmd.init == "ref" || cmd.init == "mixture") {
    result.bounds.degenerate = true;
  } else {
    result.bounds.eta_adapted = std::numeric_limits<double>::infinity();
    result.bounds.eta_adapted_raw = result.bounds.eta_adapted;
  }

  extra["rounds"] = rounds_run;
  json trace = json::array();
  for (const auto& [measure, objective] : history) trace.push_back(objective);
  extra["objective_trace"] = std::move(trace);
  return result;
}

int cmd_barycenter(const BarycenterCmd& cmd, std::ostream& out) {
  Problem problem = assemble_problem(cmd.spec);
  BarycenterOptions options = make_options(cmd);

  json extra;
  Stopwatch watch;
  BarycenterResult result = [&] {
    if (cmd.method == "reference") {
      const int j = cmd.ref_index >= 0 ? cmd.ref_index : default_ref_index(problem.weights);
      return reference_barycenter(problem, j, options);
    }
    if (cmd.method == "pairwise") return pairwise_barycenter(problem, options);
    if (cmd.method == "fixed-point") return run_fixed_point(problem, cmd, options, extra);
    auto [measure, objective] = exact_barycenter(problem);
    BarycenterResult oracle{std::move(measure), objective, Method::ExactOracle, problem.p,
                            -1,                 0.0,       {}};
    oracle.bounds.lower_bound = objective;
    oracle.bounds.eta_adapted = 1.0;
    oracle.bounds.eta_adapted_raw = 1.0;
    oracle.bounds.eta_worst_case = 1.0;
    return oracle;
  }();
  const double wall = watch.seconds();

  json doc = result_json(result);
  for (auto& [key, value] : extra.items()) doc[key] = value;
  write_text(cmd.out_path, doc.dump(2) + "\n");
  if (!cmd.svg_path.empty()) write_text(cmd.svg_path, measure_to_svg(result.measure));

  print_result(out, result, wall);
  out << "wrote " << cmd.out_path << "\n";
  return 0;
}

struct DistCmd {
  std::string a, b;
  int p_value = 2;
  std::string plan_path;
};

int cmd_dist(const DistCmd& cmd, std::ostream& out) {
  const CostExponent p = cost_exponent_from_int(cmd.p_value);
  DiscreteMeasure mu = load_measure(cmd.a);
  DiscreteMeasure nu = load_measure(cmd.b);
  OtSolution solution = solve_ot(mu, nu, p);
  const double wp = std::pow(solution.cost, 1.0 / exponent(p));
  out << "W_p^p: " << solution.cost << "\n";
  out << "W_p:   " << wp << "\n";
  if (!cmd.plan_path.empty()) {
    json doc;
    json entries = json::array();
    for (const auto& e : solution.plan.entries)
      entries.push_back(json::array({e.row, e.col, e.mass}));
    doc["entries"] = std::move(entries);
    doc["cost"] = solution.cost;
    write_text(cmd.plan_path, doc.dump(2) + "\n");
  }
  return 0;
}

struct SweepCmd {
  ProblemSpec spec;
  std::string lambdas_text;
  std::string lambda_file;
  int grid = 0;
  double eps = 1e-6;
  std::string plan_cost = "match-p";
  std::string out_dir = "sweep";
  bool emit_svg = false;
};

std::vector<Vector> sweep_weight_vectors(const SweepCmd& cmd, Index n) {
  std::vector<Vector> list;
  auto parse_line = [&](const std::string& line) {
    std::stringstream stream(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(stream, cell, ',')) {
      if (cell.empty()) continue;
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ValidationError("cannot parse weight entry '" + cell + "'");
      }
    }
    if (values.empty()) return;
    if (static_cast<Index>(values.size()) != n)
      throw ValidationError("weight vector length " + std::to_string(values.size()) +
                            " does not match " + std::to_string(n) + " measures");
    Vector lambda(n);
    for (Index i = 0; i < n; ++i) {
      if (values[static_cast<std::size_t>(i)] < 0.0)
        throw ValidationError("weights must be nonnegative");
      lambda[i] = std::max(values[static_cast<std::size_t>(i)], 1e-9);
    }
    list.push_back(lambda);
  };

  if (cmd.grid > 0) {
    if (n != 4) throw ValidationError("--grid interpolation needs exactly four inputs");
    const int k = cmd.grid;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const double s = k == 1 ? 0.0 : static_cast<double>(a) / (k - 1);
        const double t = k == 1 ? 0.0 : static_cast<double>(b) / (k - 1);
        Vector lambda(4);
        lambda << (1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t;
        for (Index i = 0; i < 4; ++i) lambda[i] = std::max(lambda[i], 1e-9);
        list.push_back(lambda);
      }
    return list;
  }
  if (!cmd.lambda_file.empty()) {
    std::ifstream file(cmd.lambda_file);
    if (!file) throw ValidationError("cannot open " + cmd.lambda_file);
    std::string line;
    while (std::getline(file, line)) parse_line(line);
  } else {
    std::stringstream stream(cmd.lambdas_text);
    std::string line;
    while (std::getline(stream, line, ';')) parse_line(line);
  }
  if (list.empty()) throw ValidationError("sweep needs at least one weight vector");
  return list;
}

int cmd_sweep(const SweepCmd& cmd, std::ostream& out) {
  Problem problem = assemble_problem(cmd.spec);
  const Index n = static_cast<Index>(problem.measures.size());
  const std::vector<Vector> lambdas = sweep_weight_vectors(cmd, n);

  BarycenterOptions options;
  options.eps = cmd.eps;
  if (cmd.plan_cost == "c2") {
    if (problem.p != CostExponent::p1)
      throw ValidationError("--plan-cost c2 is the swap variant for --p 1 runs only");
    options.plan_cost = PlanCost::SquaredEuclidean;
  }

  // The pairwise plans do not depend on the weights; solve them once.
  Stopwatch plan_watch;
  const PairwisePlanSet plans = compute_pairwise_plans(problem, options);
  out << "solved " << plans.upper.size() << " pairwise plans in " << plan_watch.seconds()
      << " s\n";

  fs::create_directories(cmd.out_dir);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    Problem reweighted = problem;
    reweighted.weights = Weights(lambdas[k]);
    BarycenterResult result = pairwise_barycenter_from_plans(reweighted, plans, options);

    char name[32];
    std::snprintf(name, sizeof(name), "result_%03zu.json", k);
    const fs::path path = fs::path(cmd.out_dir) / name;
    write_text(path, result_json(result).dump(2) + "\n");
    if (cmd.emit_svg) {
      std::snprintf(name, sizeof(name), "result_%03zu.svg", k);
      write_text(fs::path(cmd.out_dir) / name, measure_to_svg(result.measure));
    }
    out << path.string() << " objective: " << result.objective
        << " eta: " << result.bounds.eta_adapted << "\n";
  }
  return 0;
}

struct CompareCmd {
  ProblemSpec spec;
  bool against_oracle = false;
  int ref_index = -1;
  double eps = 1e-6;
  std::string out_path = "compare.csv";
};

int cmd_compare(const CompareCmd& cmd, std::ostream& out) {
  Problem problem = assemble_problem(cmd.spec);
  BarycenterOptions options;
  options.eps = cmd.eps;

  struct Row {
    std::string method;
    double objective;
    double ratio;
    std::string basis;
    double eta;
    double wall;
  };
  std::vector<Row> rows;

  Stopwatch ref_watch;
  const int j = cmd.ref_index >= 0 ? cmd.ref_index : default_ref_index(problem.weights);
  BarycenterResult reference = reference_barycenter(problem, j, options);
  const double ref_wall = ref_watch.seconds();

  Stopwatch pair_watch;
  BarycenterResult pairwise = pairwise_barycenter(problem, options);
  const double pair_wall = pair_watch.seconds();

  double baseline = 0.0;
  std::string basis;
  double oracle_wall = 0.0;
  std::optional<double> oracle_value;
  if (cmd.against_oracle) {
    Stopwatch oracle_watch;
    oracle_value = exact_barycenter(problem).second;
    oracle_wall = oracle_watch.seconds();
    baseline = *oracle_value;
    basis = "oracle";
  } else {
    baseline = pairwise.bounds.lower_bound;
    basis = "lower_bound";
  }

  auto ratio_of = [&](double objective) {
    if (baseline <= 1e-15) return 1.0;  // identical inputs: everything is optimal
    return objective / baseline;
  };
  const std::string effective_basis = baseline <= 1e-15 ? "degenerate" : basis;

  rows.push_back({"reference", reference.objective, ratio_of(reference.objective),
                  effective_basis, reference.bounds.eta_adapted, ref_wall});
  rows.push_back({"pairwise", pairwise.objective, ratio_of(pairwise.objective), effective_basis,
                  pairwise.bounds.eta_adapted, pair_wall});
  if (oracle_value)
    rows.push_back({"exact-oracle", *oracle_value, 1.0, effective_basis, 1.0, oracle_wall});

  std::ostringstream csv;
  csv << "method,objective,ratio,ratio_basis,eta,wall_seconds\n";
  csv.precision(12);
  for (const auto& row : rows)
    csv << row.method << "," << row.objective << "," << row.ratio << "," << row.basis << ","
        << row.eta << "," << row.wall << "\n";
  write_text(cmd.out_path, csv.str());
  out << csv.str();
  return 0;
}

struct PlotCmd {
  std::string input;
  std::string out_path = "plot.svg";
};

int cmd_plot(const PlotCmd& cmd, std::ostream& out) {
  DiscreteMeasure measure = load_measure(cmd.input, MeasureFormat::Auto);
  write_text(cmd.out_path, measure_to_svg(measure));
  out << "wrote " << cmd.out_path << "\n";
  return 0;
}

struct GenCmd {
  std::string kind;
  int n = 10;
  int atoms = 50;
  int resolution = 60;
  std::uint64_t seed = 1;
  std::string out_dir = "instance";
  bool pgm = false;
};

int cmd_gen(const GenCmd& cmd, std::ostream& out) {
  Problem problem = cmd.kind == "sharpness" ? gen_sharpness_instance(cmd.n, CostExponent::p2)
                    : cmd.kind == "disk" ? gen_unit_disk_cloud(cmd.n, cmd.atoms, cmd.seed)
                                         : gen_nested_ellipses(cmd.n, cmd.resolution, cmd.seed);
  fs::create_directories(cmd.out_dir);
  for (std::size_t i = 0; i < problem.measures.size(); ++i) {
    char name[32];
    if (cmd.pgm) {
      if (cmd.kind != "ellipses")
        throw ValidationError("--pgm output is only available for ellipse rasters");
      std::snprintf(name, sizeof(name), "m_%02zu.pgm", i);
      const auto& mu = problem.measures[i];
      const int res = cmd.resolution;
      std::vector<int> image(static_cast<std::size_t>(res) * res, 0);
      for (Index k = 0; k < mu.size(); ++k) {
        const int c = static_cast<int>(std::lround(mu.points()(k, 0) * res));
        const int r = res - 1 - static_cast<int>(std::lround(mu.points()(k, 1) * res));
        image[static_cast<std::size_t>(r) * res + c] = 255;
      }
      std::string pgm = "P2\n" + std::to_string(res) + " " + std::to_string(res) + "\n255\n";
      for (int r = 0; r < res; ++r) {
        for (int c = 0; c < res; ++c) {
          pgm += std::to_string(image[static_cast<std::size_t>(r) * res + c]);
          pgm += c + 1 == res ? '\n' : ' ';
        }
      }
      write_text(fs::path(cmd.out_dir) / name, pgm);
    } else {
      std::snprintf(name, sizeof(name), "m_%02zu.json", i);
      save_measure_json(problem.measures[i], fs::path(cmd.out_dir) / name);
    }
    out << (fs::path(cmd.out_dir) / name).string() << "\n";
  }
  return 0;
}

struct OracleCmd {
  ProblemSpec spec;
  std::string out_path = "oracle.json";
};

int cmd_oracle(const OracleCmd& cmd, std::ostream& out) {
  Problem problem = assemble_problem(cmd.spec);
  Stopwatch watch;
  auto [measure, objective] = exact_barycenter(problem);
  const double wall = watch.seconds();
  BarycenterResult result{std::move(measure), objective, Method::ExactOracle, problem.p, -1, 0.0,
                          {}};
  result.bounds.lower_bound = objective;
  result.bounds.eta_adapted = 1.0;
  result.bounds.eta_adapted_raw = 1.0;
  result.bounds.eta_worst_case = 1.0;
  write_text(cmd.out_path, result_json(result).dump(2) + "\n");
  print_result(out, result, wall);
  out << "wrote " << cmd.out_path << "\n";
  return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"free-support Wasserstein barycenters with certified error bounds"};
  app.require_subcommand(1);
  app.footer("WBARY_THREADS caps the number of parallel transport solves (default: all cores).");

  BarycenterCmd bary;
  auto* bary_cmd = app.add_subcommand(
      "barycenter", "approximate barycenter of the input measures");
  add_problem_options(bary_cmd, bary.spec);
  bary_cmd->add_option("--method", bary.method,
                       "reference|pairwise|fixed-point|exact-oracle (default pairwise)")
      ->check(CLI::IsMember({"reference", "pairwise", "fixed-point", "exact-oracle"}));
  bary_cmd->add_option("--ref-index", bary.ref_index,
                       "reference measure index (default: largest weight)");
  bary_cmd->add_option("--eps", bary.eps, "geometric median accuracy for p=1 (default 1e-6)");
  bary_cmd->add_option("--plan-cost", bary.plan_cost,
                       "match-p|c2; c2 solves plans under squared costs while placing atoms "
                       "with medians (p=1 only)")
      ->check(CLI::IsMember({"match-p", "c2"}));
  bary_cmd->add_option("--rounds", bary.rounds,
                       "fixed-point rounds (default 5; the first round buys most of the "
                       "improvement)");
  bary_cmd->add_option("--init", bary.init,
                       "fixed-point start: ref|mixture|<measure file> (default ref)");
  bary_cmd->add_option("-o,--out", bary.out_path, "result file (default result.json)");
  bary_cmd->add_option("--svg", bary.svg_path, "also write an SVG scatter (d=2 only)");
  bary_cmd->add_option("--max-pivots", bary.max_pivots, "solver pivot budget override")
      ->group("");

  DistCmd dist;
  auto* dist_cmd = app.add_subcommand("dist", "Wasserstein distance between two measures");
  dist_cmd->add_option("a", dist.a, "first measure")->required();
  dist_cmd->add_option("b", dist.b, "second measure")->required();
  dist_cmd->add_option("--p", dist.p_value, "cost exponent, 1 or 2 (default 2)")
      ->check(CLI::IsMember({1, 2}));
  dist_cmd->add_option("--plan", dist.plan_path, "export the optimal plan as JSON");

  SweepCmd sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "pairwise barycenters for many weight vectors, reusing the plans");
  add_problem_options(sweep_cmd, sweep.spec);
  sweep_cmd->add_option("--lambdas", sweep.lambdas_text,
                        "semicolon separated weight vectors, e.g. '0.2,0.8;0.5,0.5'");
  sweep_cmd->add_option("--lambda-file", sweep.lambda_file, "file with one weight vector per line");
  sweep_cmd->add_option("--grid", sweep.grid,
                        "KxK bilinear interpolation grid between four inputs");
  sweep_cmd->add_option("--eps", sweep.eps, "median accuracy for p=1 (default 1e-6)");
  sweep_cmd->add_option("--plan-cost", sweep.plan_cost, "match-p|c2 (p=1 only)")
      ->check(CLI::IsMember({"match-p", "c2"}));
  sweep_cmd->add_option("--out-dir", sweep.out_dir, "output directory (default sweep)");
  sweep_cmd->add_flag("--svg", sweep.emit_svg, "also write SVG scatters");

  CompareCmd compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "reference vs pairwise table on one instance");
  add_problem_options(compare_cmd, compare.spec);
  compare_cmd->add_flag("--oracle", compare.against_oracle,
                        "compute the exact optimum and report ratios against it");
  compare_cmd->add_option("--ref-index", compare.ref_index, "reference measure index");
  compare_cmd->add_option("--eps", compare.eps, "median accuracy for p=1");
  compare_cmd->add_option("-o,--out", compare.out_path, "CSV table (default compare.csv)");

  PlotCmd plot;
  auto* plot_cmd = app.add_subcommand("plot", "SVG scatter of a measure or result file");
  plot_cmd->add_option("input", plot.input, "measure or result JSON")->required();
  plot_cmd->add_option("-o,--out", plot.out_path, "SVG file (default plot.svg)");

  GenCmd gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic instance to files");
  gen_cmd->add_option("kind", gen.kind, "sharpness|disk|ellipses")
      ->required()
      ->check(CLI::IsMember({"sharpness", "disk", "ellipses"}));
  gen_cmd->add_option("--n", gen.n, "number of measures (default 10)");
  gen_cmd->add_option("--atoms", gen.atoms, "atoms per disk cloud (default 50)");
  gen_cmd->add_option("--resolution", gen.resolution, "ellipse raster resolution (default 60)");
  gen_cmd->add_option("--seed", gen.seed, "generator seed (default 1)");
  gen_cmd->add_option("--out-dir", gen.out_dir, "output directory (default instance)");
  gen_cmd->add_flag("--pgm", gen.pgm, "write ellipse rasters as PGM images");

  OracleCmd oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact small-instance barycenter (debugging)");
  oracle_cmd->group("");  // hidden
  add_problem_options(oracle_cmd, oracle.spec);
  oracle_cmd->add_option("-o,--out", oracle.out_path, "result file (default oracle.json)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("wbary");
  for (const auto& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bary_cmd) return cmd_barycenter(bary, out);
    if (*dist_cmd) return cmd_dist(dist, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out);
    if (*compare_cmd) return cmd_compare(compare, out);
    if (*plot_cmd) return cmd_plot(plot, out);
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*oracle_cmd) return cmd_oracle(oracle, out);
    err << "error: no subcommand selected\n";
    return 1;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wbary::cli
