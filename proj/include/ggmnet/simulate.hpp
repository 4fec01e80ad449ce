#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggmnet/estimators.hpp"
#include "ggmnet/metrics.hpp"
#include "ggmnet/model_select.hpp"
#include "ggmnet/netgen.hpp"
#include "ggmnet/parallel.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

struct SimulationOptions {
  std::vector<TopologySpec> topologies;
  int replicates = 30;
  int n = 1000;
  std::vector<EstimatorKind> estimators;
  std::vector<Criterion> criteria;
  GridSpec grid = paper_grid();
  int folds = 5;
  std::uint64_t seed = 1;
  double v = 0.3;
  double u = 0.1;
  int threads = 0;
  bool emit_roc = true;
  EstimatorSpec base_spec;  // solver configuration shared across kinds
};

struct ReplicateOutcome {
  bool ok = false;
  std::string error;
  double accuracy = 0.0;
  double f1 = 0.0;
  double frobenius = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
};

struct Aggregate {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  int count = 0;
};

struct SimulationCell {
  std::string topology;
  std::string estimator;
  std::string criterion;
  int n = 0;
  std::vector<ReplicateOutcome> outcomes;
  std::optional<RocPath> roc;  // lambda path at replicate 0's selected alpha

  int successes() const {
    int c = 0;
    for (const auto& o : outcomes) c += o.ok ? 1 : 0;
    return c;
  }

  Aggregate aggregate(double ReplicateOutcome::* field) const {
    Aggregate a;
    double sum = 0.0;
    for (const auto& o : outcomes) {
      if (!o.ok) continue;
      sum += o.*field;
      ++a.count;
    }
    if (a.count == 0) return a;
    a.mean = sum / a.count;
    if (a.count >= 2) {
      double ss = 0.0;
      for (const auto& o : outcomes) {
        if (!o.ok) continue;
        ss += (o.*field - a.mean) * (o.*field - a.mean);
      }
      a.sd = std::sqrt(ss / (a.count - 1));
    }
    return a;
  }
};

struct SimulationResults {
  std::vector<SimulationCell> cells;
  std::vector<std::uint64_t> dataset_seeds;  // per (topology, replicate), topology-major
  std::vector<std::uint64_t> structure_seeds;
};

namespace detail {

inline EstimatorSpec spec_for(const SimulationOptions& opts, EstimatorKind kind) {
  EstimatorSpec s = opts.base_spec;
  s.kind = kind;
  return s;
}

}  // namespace detail

/// Replicates the simulation protocol: one fixed structure per topology,
/// `replicates` Gaussian datasets from it, grid selection per dataset and
/// criterion, then edge-recovery and partial-correlation metrics against
/// the ground truth. All stochastic steps derive from opts.seed.
inline SimulationResults run_simulation(const SimulationOptions& opts) {
  if (opts.topologies.empty() || opts.estimators.empty() || opts.criteria.empty()) {
    throw std::invalid_argument("run_simulation: topologies, estimators and criteria must be nonempty");
  }
  if (opts.replicates < 1) throw std::invalid_argument("run_simulation: need at least one replicate");

  SimulationResults results;
  struct TopoData {
    GroundTruth gt;
    SymMatrix p_true;
    std::vector<Dataset> datasets;
  };
  std::vector<TopoData> topo_data;
  topo_data.reserve(opts.topologies.size());
  for (std::size_t t = 0; t < opts.topologies.size(); ++t) {
    TopologySpec spec = opts.topologies[t];
    spec.seed = rng::derive_seed(opts.seed, 0x5700 + t);
    results.structure_seeds.push_back(spec.seed);
    GroundTruth gt = make_ground_truth(spec, opts.v, opts.u);
    SymMatrix p_true = partial_correlation(gt.theta);
    std::vector<Dataset> datasets;
    datasets.reserve(opts.replicates);
    for (int r = 0; r < opts.replicates; ++r) {
      const std::uint64_t ds_seed = rng::derive_seed(opts.seed, (t << 24) ^ static_cast<std::uint64_t>(r));
      results.dataset_seeds.push_back(ds_seed);
      datasets.push_back(sample_gaussian(gt.sigma, opts.n, ds_seed));
    }
    topo_data.push_back(TopoData{std::move(gt), std::move(p_true), std::move(datasets)});
  }

  for (std::size_t t = 0; t < opts.topologies.size(); ++t) {
    for (const EstimatorKind kind : opts.estimators) {
      for (const Criterion crit : opts.criteria) {
        SimulationCell cell;
        cell.topology = topology_name(opts.topologies[t].kind);
        cell.estimator = estimator_name(kind);
        cell.criterion = criterion_name(crit);
        cell.n = opts.n;
        cell.outcomes.resize(opts.replicates);
        results.cells.push_back(std::move(cell));
      }
    }
  }

  struct Task {
    std::size_t cell;
    std::size_t topo;
    EstimatorKind kind;
    Criterion crit;
    int rep;
  };
  std::vector<Task> tasks;
  {
    std::size_t cell_idx = 0;
    for (std::size_t t = 0; t < opts.topologies.size(); ++t) {
      for (const EstimatorKind kind : opts.estimators) {
        for (const Criterion crit : opts.criteria) {
          for (int r = 0; r < opts.replicates; ++r) {
            tasks.push_back(Task{cell_idx, t, kind, crit, r});
          }
          ++cell_idx;
        }
      }
    }
  }

  parallel_for(tasks.size(), opts.threads, [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const TopoData& td = topo_data[task.topo];
    const Dataset& data = td.datasets[task.rep];
    ReplicateOutcome& out = results.cells[task.cell].outcomes[task.rep];
    try {
      const EstimatorSpec spec = detail::spec_for(opts, task.kind);
      const std::uint64_t fold_seed =
          rng::derive_seed(opts.seed, 0xCF00 ^ (task.topo << 20) ^ static_cast<std::uint64_t>(task.rep));
      const SelectionReport report =
          grid_search(data, spec, opts.grid, task.crit, opts.folds, fold_seed, 1);
      const EstimationResult fit = run_estimator(spec, data, report.best);
      const EdgeSet estimated = edge_set_of(fit.theta_hat);
      const auto scores = classification_scores(confusion(td.gt.adjacency, estimated));
      out.accuracy = scores.accuracy;
      out.f1 = scores.f1;
      out.precision = scores.precision;
      out.recall = scores.recall;
      out.frobenius = frobenius_distance(td.p_true, partial_correlation(fit.theta_hat));
      out.alpha = report.best.alpha;
      out.lambda = report.best.lambda;
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  });

  if (opts.emit_roc) {
    // Lambda-path ROC for replicate 0 at its optimally selected alpha,
    // with the selected lambda marked.
    std::size_t cell_idx = 0;
    for (std::size_t t = 0; t < opts.topologies.size(); ++t) {
      for (const EstimatorKind kind : opts.estimators) {
        for (const Criterion crit : opts.criteria) {
          (void)crit;
          SimulationCell& cell = results.cells[cell_idx++];
          const ReplicateOutcome& first = cell.outcomes.front();
          if (!first.ok) continue;
          const TopoData& td = topo_data[t];
          const EstimatorSpec spec = detail::spec_for(opts, kind);
          std::vector<std::pair<double, EdgeSet>> estimates;
          try {
            if (kind == EstimatorKind::Gelnet || kind == EstimatorKind::Glasso) {
              const auto path = gelnet_path(td.datasets.front().sample_covariance(), first.alpha,
                                            opts.grid.lambdas, spec.gelnet);
              for (std::size_t l = 0; l < opts.grid.lambdas.size(); ++l) {
                estimates.emplace_back(opts.grid.lambdas[l], edge_set_of(path[l].theta_hat));
              }
            } else {
              for (const double lambda : opts.grid.lambdas) {
                const auto fit = run_estimator(spec, td.datasets.front(),
                                               PenaltyParams(first.alpha, lambda));
                estimates.emplace_back(lambda, edge_set_of(fit.theta_hat));
              }
            }
            RocPath roc = roc_path(td.gt.adjacency, estimates);
            for (std::size_t l = 0; l < opts.grid.lambdas.size(); ++l) {
              if (opts.grid.lambdas[l] == first.lambda) {
                roc.selected_index = static_cast<int>(l);
                break;
              }
            }
            cell.roc = std::move(roc);
          } catch (const std::exception&) {
            // ROC emission is best-effort; the cell keeps its outcomes.
          }
        }
      }
    }
  }

  return results;
}

}  // namespace ggmnet
