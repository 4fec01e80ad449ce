// Command-line toolkit for sparse precision-matrix estimation: structure
// generation, single estimates, penalty selection, the full simulation
// study, and the empirical network-analysis pipeline.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ggmnet/estimators.hpp"
#include "ggmnet/io.hpp"
#include "ggmnet/model_select.hpp"
#include "ggmnet/net_analysis.hpp"
#include "ggmnet/netgen.hpp"
#include "ggmnet/parallel.hpp"
#include "ggmnet/prewhiten.hpp"
#include "ggmnet/simulate.hpp"
#include "ggmnet/two_stage.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ggmnet;

namespace {

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct Manifest {
  json j;
  std::string out_dir;

  Manifest(const std::string& command, const std::string& dir) : out_dir(dir) {
    j["command"] = command;
    j["version"] = GGMNET_VERSION;
    j["started_at"] = iso_now();
    j["outputs"] = json::array();
    j["seeds"] = json::object();
    j["config"] = json::object();
    fs::create_directories(dir);
  }

  std::string path(const std::string& name) {
    j["outputs"].push_back(name);
    return (fs::path(out_dir) / name).string();
  }

  void write() {
    j["finished_at"] = iso_now();
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    out << j.dump(2) << '\n';
  }
};

json params_json(const PenaltyParams& p) { return json{{"alpha", p.alpha}, {"lambda", p.lambda}}; }

json result_json(const EstimationResult& r) {
  json j;
  j["params"] = params_json(r.params);
  j["iterations"] = r.iterations;
  j["final_delta"] = r.final_delta;
  j["converged"] = r.converged;
  j["positive_definite"] = r.theta_pd;
  j["edges"] = edge_set_of(r.theta_hat).size();
  return j;
}

json selection_json(const SelectionReport& r) {
  json j;
  j["alphas"] = r.grid.alphas;
  j["lambdas"] = r.grid.lambdas;
  j["criterion"] = criterion_name(r.criterion);
  if (r.folds) j["folds"] = *r.folds;
  j["seed"] = r.seed;
  j["best"] = params_json(r.best);
  json scores = json::array();
  for (Eigen::Index a = 0; a < r.scores.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index l = 0; l < r.scores.cols(); ++l) {
      const double v = r.scores(a, l);
      if (std::isfinite(v)) {
        row.push_back(v);
      } else {
        row.push_back(nullptr);
      }
    }
    scores.push_back(std::move(row));
  }
  j["scores"] = std::move(scores);
  return j;
}

Dataset standardize_columns(const Dataset& d) {
  Eigen::MatrixXd m = d.values();
  const Eigen::VectorXd means = m.colwise().mean();
  for (int j = 0; j < d.cols(); ++j) {
    const double sd = std::sqrt((m.col(j).array() - means[j]).square().mean());
    if (sd > 0.0) m.col(j) = (m.col(j).array() - means[j]) / sd;
  }
  return Dataset(std::move(m), d.labels());
}

/// Reads a dataset for estimation: plain numeric CSV (no header) or a
/// labeled table with an optional date column.
Dataset read_estimation_data(const std::string& path, bool labeled) {
  if (labeled) return io::read_table_csv(path);
  return Dataset(io::read_matrix_csv(path));
}

struct TopologyCliParams {
  std::optional<double> edge_prob;
  std::optional<int> groups;
  std::optional<int> bandwidth;
  std::optional<int> core_size;
  double within_prob = 0.6;
  int ring_neighbors = 2;
  double rewire_prob = 0.1;
};

TopologySpec make_spec(Topology kind, int p, std::uint64_t seed, const TopologyCliParams& c) {
  TopologySpec spec;
  spec.kind = kind;
  spec.p = p;
  spec.seed = seed;
  spec.edge_prob = c.edge_prob;
  spec.groups = c.groups;
  spec.bandwidth = c.bandwidth;
  spec.core_size = c.core_size;
  spec.within_prob = c.within_prob;
  spec.ring_neighbors = c.ring_neighbors;
  spec.rewire_prob = c.rewire_prob;
  return spec;
}

json spec_json(const TopologySpec& s) {
  json j;
  j["kind"] = topology_name(s.kind);
  j["p"] = s.p;
  j["seed"] = s.seed;
  if (s.edge_prob) j["edge_prob"] = *s.edge_prob;
  if (s.groups) j["groups"] = *s.groups;
  if (s.bandwidth) j["bandwidth"] = *s.bandwidth;
  if (s.core_size) j["core_size"] = *s.core_size;
  j["within_prob"] = s.within_prob;
  j["ring_neighbors"] = s.ring_neighbors;
  j["rewire_prob"] = s.rewire_prob;
  return j;
}

void write_estimate_files(Manifest& man, const EstimationResult& res) {
  io::write_matrix_csv(man.path("theta.csv"), res.theta_hat.mat());
  if (res.w_hat) io::write_matrix_csv(man.path("w.csv"), res.w_hat->mat());
  if (res.selected_edges) io::write_edge_set_json(man.path("edges.json"), *res.selected_edges);
  std::ofstream out(man.path("result.json"));
  out << result_json(res).dump(2) << '\n';
}

std::string fmt_cell(double v) { return io::format_double(v); }

void write_simulation_csvs(Manifest& man, const SimulationResults& results, int replicates) {
  {
    std::ofstream out(man.path("results.csv"));
    out << "topology,estimator,criterion,n,replicates,successes,"
           "accuracy_mean,accuracy_sd,f1_mean,f1_sd,frobenius_mean,frobenius_sd,"
           "precision_mean,recall_mean,alpha_mean,lambda_mean\n";
    for (const auto& cell : results.cells) {
      const auto acc = cell.aggregate(&ReplicateOutcome::accuracy);
      const auto f1 = cell.aggregate(&ReplicateOutcome::f1);
      const auto fro = cell.aggregate(&ReplicateOutcome::frobenius);
      const auto prec = cell.aggregate(&ReplicateOutcome::precision);
      const auto rec = cell.aggregate(&ReplicateOutcome::recall);
      const auto alpha = cell.aggregate(&ReplicateOutcome::alpha);
      const auto lambda = cell.aggregate(&ReplicateOutcome::lambda);
      auto stat = [&](const Aggregate& a) {
        return a.count > 0 ? fmt_cell(a.mean) : std::string();
      };
      auto sd = [&](const Aggregate& a) {
        return a.count >= 2 ? fmt_cell(a.sd) : std::string();
      };
      out << cell.topology << ',' << cell.estimator << ',' << cell.criterion << ',' << cell.n << ','
          << replicates << ',' << cell.successes() << ',' << stat(acc) << ',' << sd(acc) << ','
          << stat(f1) << ',' << sd(f1) << ',' << stat(fro) << ',' << sd(fro) << ',' << stat(prec)
          << ',' << stat(rec) << ',' << stat(alpha) << ',' << stat(lambda) << '\n';
    }
  }
  {
    std::ofstream out(man.path("replicates.csv"));
    out << "topology,estimator,criterion,rep,ok,accuracy,f1,frobenius,precision,recall,alpha,lambda\n";
    for (const auto& cell : results.cells) {
      for (std::size_t r = 0; r < cell.outcomes.size(); ++r) {
        const auto& o = cell.outcomes[r];
        out << cell.topology << ',' << cell.estimator << ',' << cell.criterion << ',' << r << ','
            << (o.ok ? 1 : 0) << ',';
        if (o.ok) {
          out << fmt_cell(o.accuracy) << ',' << fmt_cell(o.f1) << ',' << fmt_cell(o.frobenius)
              << ',' << fmt_cell(o.precision) << ',' << fmt_cell(o.recall) << ','
              << fmt_cell(o.alpha) << ',' << fmt_cell(o.lambda);
        } else {
          out << ",,,,,,";
        }
        out << '\n';
      }
    }
  }
  {
    std::ofstream out(man.path("roc.csv"));
    out << "topology,estimator,criterion,lambda,fpr,tpr,selected\n";
    for (const auto& cell : results.cells) {
      if (!cell.roc) continue;
      for (std::size_t i = 0; i < cell.roc->points.size(); ++i) {
        const auto& pt = cell.roc->points[i];
        const bool sel = cell.roc->selected_index && *cell.roc->selected_index == static_cast<int>(i);
        out << cell.topology << ',' << cell.estimator << ',' << cell.criterion << ','
            << fmt_cell(pt.lambda) << ',' << fmt_cell(pt.fpr) << ',' << fmt_cell(pt.tpr) << ','
            << (sel ? 1 : 0) << '\n';
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Gaussian graphical model estimation with elastic-net penalties"};
  app.require_subcommand(1);

  const std::vector<std::string> all_topologies = {"scale-free", "random",      "hub",
                                                   "cluster",    "band",        "small-world",
                                                   "core-periphery"};
  const std::vector<std::string> all_estimators = {"gelnet", "2s-and", "2s-or",
                                                   "cr-l2",  "cr-minel", "glasso"};

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Generate a ground-truth structure and its matrices");
  std::string gen_kind = "band", gen_out = "generated";
  int gen_p = 30;
  std::uint64_t gen_seed = 1;
  double gen_v = 0.3, gen_u = 0.1;
  TopologyCliParams gen_params;
  gen->add_option("--kind", gen_kind, "Topology: " + CLI::detail::join(all_topologies))
      ->required()
      ->check(CLI::IsMember(all_topologies));
  gen->add_option("--p", gen_p, "Node count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Structure seed");
  gen->add_option("--v", gen_v, "Off-diagonal magnitude of the precision matrix");
  gen->add_option("--u", gen_u, "Extra diagonal shift");
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--edge-prob", [&gen_params](const std::vector<std::string>& v) {
        gen_params.edge_prob = std::stod(v[0]);
        return true;
      }, "Random: edge probability (default 3/p)");
  gen->add_option("--groups", [&gen_params](const std::vector<std::string>& v) {
        gen_params.groups = std::stoi(v[0]);
        return true;
      }, "Hub/cluster: group count (default ceil(p/15))");
  gen->add_option("--bandwidth", [&gen_params](const std::vector<std::string>& v) {
        gen_params.bandwidth = std::stoi(v[0]);
        return true;
      }, "Band: bandwidth (default 3)");
  gen->add_option("--core", [&gen_params](const std::vector<std::string>& v) {
        gen_params.core_size = std::stoi(v[0]);
        return true;
      }, "Core-periphery: core size (default ceil(0.2p))");
  gen->add_option("--within-prob", gen_params.within_prob, "Cluster: within-block edge probability");
  gen->add_option("--ring", gen_params.ring_neighbors, "Small-world: ring neighbors per side");
  gen->add_option("--rewire", gen_params.rewire_prob, "Small-world: rewiring probability");

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "Estimate a precision matrix at fixed (alpha, lambda)");
  std::string est_data, est_estimator = "2s-and", est_out = "estimate";
  double est_alpha = 1.0, est_lambda = 0.1;
  bool est_labeled = false, est_standardize = false;
  est->add_option("--data", est_data, "Observations CSV (plain numeric, row per observation)")
      ->required();
  est->add_option("--estimator", est_estimator, "One of: " + CLI::detail::join(all_estimators))
      ->check(CLI::IsMember(all_estimators));
  est->add_option("--alpha", est_alpha, "Elastic-net mix (ignored for glasso)");
  est->add_option("--lambda", est_lambda, "Penalty strength");
  est->add_option("--out", est_out, "Output directory");
  est->add_flag("--labeled", est_labeled, "Input has a header row (and optional date column)");
  est->add_flag("--standardize", est_standardize, "Scale columns to unit variance first");

  // ---- select ----
  auto* sel = app.add_subcommand("select", "Grid-search (alpha, lambda) by BIC or cross-validation");
  std::string sel_data, sel_estimator = "2s-and", sel_criterion = "bic", sel_out = "selection";
  int sel_grid_alphas = 41, sel_grid_lambdas = 101, sel_folds = 5, sel_threads = 0;
  double sel_lambda_max = 0.4;
  std::uint64_t sel_seed = 1;
  bool sel_labeled = false, sel_standardize = false;
  sel->add_option("--data", sel_data, "Observations CSV")->required();
  sel->add_option("--estimator", sel_estimator, "One of: " + CLI::detail::join(all_estimators))
      ->check(CLI::IsMember(all_estimators));
  sel->add_option("--criterion", sel_criterion, "bic or cv")->check(CLI::IsMember({"bic", "cv"}));
  sel->add_option("--grid-alphas", sel_grid_alphas, "Alpha grid size")->check(CLI::PositiveNumber);
  sel->add_option("--grid-lambdas", sel_grid_lambdas, "Lambda grid size")->check(CLI::PositiveNumber);
  sel->add_option("--lambda-max", sel_lambda_max, "Upper end of the lambda grid");
  sel->add_option("--folds", sel_folds, "CV folds");
  sel->add_option("--seed", sel_seed, "CV fold shuffle seed");
  sel->add_option("--threads", sel_threads, "Worker threads (default: GGMNET_THREADS or cores)");
  sel->add_option("--out", sel_out, "Output directory");
  sel->add_flag("--labeled", sel_labeled, "Input has a header row");
  sel->add_flag("--standardize", sel_standardize, "Scale columns to unit variance first");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Run the simulation study over topologies/estimators");
  std::vector<std::string> sim_topologies = {"all"};
  std::vector<std::string> sim_estimators = {"all"};
  std::vector<std::string> sim_criteria = {"bic"};
  std::string sim_out = "simulation";
  int sim_replicates = 30, sim_n = 1000, sim_p = 30, sim_grid_alphas = 41, sim_grid_lambdas = 101;
  int sim_folds = 5, sim_threads = 0;
  double sim_lambda_max = 0.4, sim_v = 0.3, sim_u = 0.1;
  std::uint64_t sim_seed = 1;
  bool sim_no_roc = false;
  auto with_all = [](std::vector<std::string> v) {
    v.push_back("all");
    return v;
  };
  sim->add_option("--topologies", sim_topologies, "Comma list or 'all'")
      ->delimiter(',')
      ->check(CLI::IsMember(with_all(all_topologies)));
  sim->add_option("--estimators", sim_estimators, "Comma list or 'all'")
      ->delimiter(',')
      ->check(CLI::IsMember(with_all(all_estimators)));
  sim->add_option("--criteria", sim_criteria, "Comma list of bic,cv")
      ->delimiter(',')
      ->check(CLI::IsMember({"bic", "cv"}));
  sim->add_option("--replicates", sim_replicates, "Datasets per topology")->check(CLI::PositiveNumber);
  sim->add_option("--n", sim_n, "Observations per dataset")->check(CLI::PositiveNumber);
  sim->add_option("--p", sim_p, "Nodes per structure")->check(CLI::PositiveNumber);
  sim->add_option("--grid-alphas", sim_grid_alphas, "Alpha grid size")->check(CLI::PositiveNumber);
  sim->add_option("--grid-lambdas", sim_grid_lambdas, "Lambda grid size")->check(CLI::PositiveNumber);
  sim->add_option("--lambda-max", sim_lambda_max, "Upper end of the lambda grid");
  sim->add_option("--folds", sim_folds, "CV folds");
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_option("--threads", sim_threads, "Worker threads");
  sim->add_option("--v", sim_v, "Precision off-diagonal magnitude");
  sim->add_option("--u", sim_u, "Extra diagonal shift");
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_flag("--no-roc", sim_no_roc, "Skip ROC path emission");

  // ---- analyze ----
  auto* ana = app.add_subcommand("analyze", "Prewhiten, estimate and analyze a returns panel");
  std::string ana_data, ana_estimator = "2s-and", ana_criterion = "bic", ana_out = "analysis";
  std::string ana_shock_column;
  int ana_grid_alphas = 21, ana_grid_lambdas = 51, ana_folds = 5, ana_window = 252, ana_shift = 21;
  int ana_shock_index = 0, ana_threads = 0;
  double ana_lambda_max = 0.4;
  std::uint64_t ana_seed = 1;
  bool ana_no_prewhiten = false, ana_raw_residuals = false, ana_no_rolling = false;
  bool ana_signed_strength = false, ana_standardize = false;
  double ana_fixed_alpha = -1.0, ana_fixed_lambda = -1.0;
  ana->add_option("--data", ana_data, "Returns CSV with header (optional date column)")->required();
  ana->add_option("--estimator", ana_estimator, "One of: " + CLI::detail::join(all_estimators))
      ->check(CLI::IsMember(all_estimators));
  ana->add_option("--criterion", ana_criterion, "bic or cv")->check(CLI::IsMember({"bic", "cv"}));
  ana->add_option("--grid-alphas", ana_grid_alphas, "Alpha grid size")->check(CLI::PositiveNumber);
  ana->add_option("--grid-lambdas", ana_grid_lambdas, "Lambda grid size")->check(CLI::PositiveNumber);
  ana->add_option("--lambda-max", ana_lambda_max, "Upper end of the lambda grid");
  ana->add_option("--alpha", ana_fixed_alpha, "Fixed alpha (skips selection when both set)");
  ana->add_option("--lambda", ana_fixed_lambda, "Fixed lambda (skips selection when both set)");
  ana->add_option("--folds", ana_folds, "CV folds");
  ana->add_option("--seed", ana_seed, "Seed for CV folds");
  ana->add_option("--threads", ana_threads, "Worker threads");
  ana->add_option("--shock-column", ana_shock_column, "Label of the shocked series");
  ana->add_option("--shock-index", ana_shock_index, "Index of the shocked series");
  ana->add_option("--window", ana_window, "Rolling window length in observations");
  ana->add_option("--shift", ana_shift, "Rolling window shift in observations");
  ana->add_option("--out", ana_out, "Output directory");
  ana->add_flag("--no-prewhiten", ana_no_prewhiten, "Estimate on raw returns");
  ana->add_flag("--raw-residuals", ana_raw_residuals, "Use unstandardized AR-GARCH residuals");
  ana->add_flag("--no-rolling", ana_no_rolling, "Skip the rolling-strength pass");
  ana->add_flag("--signed-strength", ana_signed_strength, "Sum signed partial correlations");
  ana->add_flag("--standardize", ana_standardize, "Scale columns to unit variance first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const TopologySpec spec = make_spec(topology_from_name(gen_kind), gen_p, gen_seed, gen_params);
      const GroundTruth gt = make_ground_truth(spec, gen_v, gen_u);
      Manifest man("generate", gen_out);
      man.j["config"] = spec_json(spec);
      man.j["config"]["v"] = gen_v;
      man.j["config"]["u"] = gen_u;
      man.j["seeds"]["structure"] = gen_seed;
      io::write_edge_set_json(man.path("adjacency.json"), gt.adjacency);
      io::write_matrix_csv(man.path("theta.csv"), gt.theta.mat());
      io::write_matrix_csv(man.path("sigma.csv"), gt.sigma.mat());
      {
        std::ofstream out(man.path("spec.json"));
        out << spec_json(spec).dump(2) << '\n';
      }
      man.write();
      std::cout << "wrote ground truth (" << gt.adjacency.size() << " edges) to " << gen_out << '\n';
    } else if (est->parsed()) {
      Dataset data = read_estimation_data(est_data, est_labeled);
      if (est_standardize) data = standardize_columns(data);
      EstimatorSpec spec;
      spec.kind = estimator_from_name(est_estimator);
      const PenaltyParams params = effective_params(spec, PenaltyParams(est_alpha, est_lambda));
      const EstimationResult res = run_estimator(spec, data, params);
      Manifest man("estimate", est_out);
      man.j["config"] = {{"estimator", est_estimator},
                         {"alpha", params.alpha},
                         {"lambda", params.lambda},
                         {"standardize", est_standardize},
                         {"data", est_data}};
      write_estimate_files(man, res);
      man.write();
      if (!res.converged) {
        std::cerr << "estimate did not converge within the sweep limit\n";
        return 1;
      }
      std::cout << "estimate written to " << est_out << '\n';
    } else if (sel->parsed()) {
      Dataset data = read_estimation_data(sel_data, sel_labeled);
      if (sel_standardize) data = standardize_columns(data);
      EstimatorSpec spec;
      spec.kind = estimator_from_name(sel_estimator);
      const GridSpec grid = linear_grid(sel_grid_alphas, sel_grid_lambdas, sel_lambda_max);
      const Criterion crit = criterion_from_name(sel_criterion);
      const SelectionReport report =
          grid_search(data, spec, grid, crit, sel_folds, sel_seed, sel_threads);
      const EstimationResult best_fit = run_estimator(spec, data, report.best);
      Manifest man("select", sel_out);
      man.j["config"] = {{"estimator", sel_estimator},
                         {"criterion", sel_criterion},
                         {"grid_alphas", sel_grid_alphas},
                         {"grid_lambdas", sel_grid_lambdas},
                         {"lambda_max", sel_lambda_max},
                         {"folds", sel_folds},
                         {"standardize", sel_standardize},
                         {"data", sel_data}};
      man.j["seeds"]["cv_folds"] = sel_seed;
      {
        std::ofstream out(man.path("selection.json"));
        out << selection_json(report).dump(2) << '\n';
      }
      write_estimate_files(man, best_fit);
      man.write();
      std::cout << "best (alpha, lambda) = (" << report.best.alpha << ", " << report.best.lambda
                << ") written to " << sel_out << '\n';
    } else if (sim->parsed()) {
      SimulationOptions opts;
      if (sim_topologies.size() == 1 && sim_topologies[0] == "all") sim_topologies = all_topologies;
      if (sim_estimators.size() == 1 && sim_estimators[0] == "all") sim_estimators = all_estimators;
      for (const auto& name : sim_topologies) {
        TopologySpec spec;
        spec.kind = topology_from_name(name);
        spec.p = sim_p;
        opts.topologies.push_back(spec);
      }
      for (const auto& name : sim_estimators) opts.estimators.push_back(estimator_from_name(name));
      for (const auto& name : sim_criteria) opts.criteria.push_back(criterion_from_name(name));
      opts.replicates = sim_replicates;
      opts.n = sim_n;
      opts.grid = linear_grid(sim_grid_alphas, sim_grid_lambdas, sim_lambda_max);
      opts.folds = sim_folds;
      opts.seed = sim_seed;
      opts.v = sim_v;
      opts.u = sim_u;
      opts.threads = sim_threads;
      opts.emit_roc = !sim_no_roc;
      const SimulationResults results = run_simulation(opts);
      Manifest man("simulate", sim_out);
      man.j["config"] = {{"topologies", sim_topologies},
                         {"estimators", sim_estimators},
                         {"criteria", sim_criteria},
                         {"replicates", sim_replicates},
                         {"n", sim_n},
                         {"p", sim_p},
                         {"grid_alphas", sim_grid_alphas},
                         {"grid_lambdas", sim_grid_lambdas},
                         {"lambda_max", sim_lambda_max},
                         {"folds", sim_folds},
                         {"v", sim_v},
                         {"u", sim_u}};
      man.j["seeds"]["master"] = sim_seed;
      man.j["seeds"]["structures"] = results.structure_seeds;
      man.j["seeds"]["datasets"] = results.dataset_seeds;
      write_simulation_csvs(man, results, sim_replicates);
      man.write();
      int failures = 0;
      for (const auto& cell : results.cells) failures += sim_replicates - cell.successes();
      std::cout << "simulation written to " << sim_out << " (" << results.cells.size()
                << " cells, " << failures << " failed replicates)\n";
    } else if (ana->parsed()) {
      Dataset returns = io::read_table_csv(ana_data);
      if (ana_standardize) returns = standardize_columns(returns);
      Manifest man("analyze", ana_out);
      man.j["config"] = {{"estimator", ana_estimator},
                         {"criterion", ana_criterion},
                         {"prewhiten", !ana_no_prewhiten},
                         {"standardized_residuals", !ana_raw_residuals},
                         {"window", ana_window},
                         {"shift", ana_shift},
                         {"signed_strength", ana_signed_strength},
                         {"data", ana_data}};
      man.j["seeds"]["cv_folds"] = ana_seed;

      // 1. Prewhitening.
      Dataset net_input = returns;
      if (!ana_no_prewhiten) {
        const int n = returns.rows(), p = returns.cols();
        Eigen::MatrixXd resid(n - 1, p);
        json garch = json::object();
        const auto& labels = *returns.labels();
        for (int j = 0; j < p; ++j) {
          std::vector<double> series(returns.values().col(j).data(),
                                     returns.values().col(j).data() + n);
          const ArGarchFit fit = fit_ar1_garch11(series);
          const auto z = standardized_residuals(series, fit.params, !ana_raw_residuals);
          for (std::size_t t = 0; t < z.size(); ++t) resid(t, j) = z[t];
          garch[labels[j]] = {{"c", fit.params.c},     {"phi", fit.params.phi},
                              {"omega", fit.params.omega}, {"a", fit.params.a},
                              {"b", fit.params.b},     {"loglik", fit.loglik},
                              {"converged", fit.converged}};
        }
        net_input = Dataset(std::move(resid), returns.labels());
        io::write_dataset_csv(man.path("residuals.csv"), net_input);
        std::ofstream out(man.path("garch_params.json"));
        out << garch.dump(2) << '\n';
      }

      // 2. Estimation on the full sample.
      EstimatorSpec spec;
      spec.kind = estimator_from_name(ana_estimator);
      const Criterion crit = criterion_from_name(ana_criterion);
      const GridSpec grid = linear_grid(ana_grid_alphas, ana_grid_lambdas, ana_lambda_max);
      PenaltyParams best(1.0, 0.0);
      const bool fixed = ana_fixed_alpha >= 0.0 && ana_fixed_lambda >= 0.0;
      if (fixed) {
        best = PenaltyParams(ana_fixed_alpha, ana_fixed_lambda);
      } else {
        const SelectionReport report =
            grid_search(net_input, spec, grid, crit, ana_folds, ana_seed, ana_threads);
        best = report.best;
        std::ofstream out(man.path("selection.json"));
        out << selection_json(report).dump(2) << '\n';
      }
      const EstimationResult res = run_estimator(spec, net_input, best);
      write_estimate_files(man, res);
      const SymMatrix pcor = partial_correlation(res.theta_hat);
      io::write_matrix_csv(man.path("partial_correlations.csv"), pcor.mat());
      if (!res.selected_edges) {
        io::write_edge_set_json(man.path("edges.json"), edge_set_of(res.theta_hat));
      }

      // 3. Network measures.
      const NetworkMeasures meas = graph_measures(pcor, kZeroTol, !ana_signed_strength);
      {
        json j;
        j["Degree"] = meas.mean_degree;
        j["Distance"] = meas.mean_distance;
        j["Eccentricity"] = meas.mean_eccentricity;
        j["Clustering"] = meas.mean_clustering;
        j["Strength"] = meas.mean_strength;
        j["connected"] = meas.connected;
        j["per_node"] = {{"degree", meas.degree},
                         {"eccentricity", meas.eccentricity},
                         {"clustering", meas.clustering},
                         {"strength", meas.strength}};
        std::ofstream out(man.path("measures.json"));
        out << j.dump(2) << '\n';
      }

      // 4. Shock diffusion.
      {
        int shock_idx = ana_shock_index;
        const auto& labels = *net_input.labels();
        if (!ana_shock_column.empty()) {
          const auto it = std::find(labels.begin(), labels.end(), ana_shock_column);
          if (it == labels.end()) {
            throw std::runtime_error("shock column '" + ana_shock_column + "' not found");
          }
          shock_idx = static_cast<int>(it - labels.begin());
        }
        if (shock_idx < 0 || shock_idx >= net_input.cols()) {
          throw std::runtime_error("shock index out of range");
        }
        Eigen::VectorXd e = Eigen::VectorXd::Zero(net_input.cols());
        e[shock_idx] = 1.0;
        const Eigen::VectorXd s = shock_diffusion(pcor, e);
        std::ofstream out(man.path("shock.csv"));
        out << "series,steady_state\n";
        for (int j = 0; j < net_input.cols(); ++j) {
          out << labels[j] << ',' << io::format_double(s[j]) << '\n';
        }
        man.j["config"]["shock_index"] = shock_idx;
      }

      // 5. Rolling strength.
      if (!ana_no_rolling) {
        if (ana_window > net_input.rows()) {
          throw std::runtime_error("rolling window exceeds the sample length");
        }
        RollingConfig rc;
        rc.estimator = spec;
        rc.prewhiten = false;  // input already prewhitened above
        if (!fixed) {
          rc.grid = grid;
          rc.criterion = crit;
          rc.folds = ana_folds;
          rc.seed = ana_seed;
        } else {
          rc.fixed_params = best;
        }
        rc.absolute_strength = !ana_signed_strength;
        const auto points = rolling_strength(net_input, ana_window, ana_shift, rc);
        std::ofstream out(man.path("rolling_strength.csv"));
        out << "window_end,mean_strength,failed\n";
        for (const auto& pt : points) {
          out << pt.window_end << ',' << (pt.failed ? "" : io::format_double(pt.mean_strength))
              << ',' << (pt.failed ? 1 : 0) << '\n';
        }
      }
      man.write();
      std::cout << "analysis written to " << ana_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
