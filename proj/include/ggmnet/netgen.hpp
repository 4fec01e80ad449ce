#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggmnet/random.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

enum class Topology { ScaleFree, Random, Hub, Cluster, Band, SmallWorld, CorePeriphery };

inline std::string topology_name(Topology t) {
  switch (t) {
    case Topology::ScaleFree: return "scale-free";
    case Topology::Random: return "random";
    case Topology::Hub: return "hub";
    case Topology::Cluster: return "cluster";
    case Topology::Band: return "band";
    case Topology::SmallWorld: return "small-world";
    case Topology::CorePeriphery: return "core-periphery";
  }
  throw std::logic_error("topology_name: unknown kind");
}

inline Topology topology_from_name(const std::string& s) {
  if (s == "scale-free") return Topology::ScaleFree;
  if (s == "random") return Topology::Random;
  if (s == "hub") return Topology::Hub;
  if (s == "cluster") return Topology::Cluster;
  if (s == "band") return Topology::Band;
  if (s == "small-world") return Topology::SmallWorld;
  if (s == "core-periphery") return Topology::CorePeriphery;
  throw std::invalid_argument("unknown topology '" + s +
                              "' (valid: scale-free, random, hub, cluster, band, small-world, "
                              "core-periphery)");
}

/// Parameters for one ground-truth structure. Unset kind-specific values
/// fall back to documented defaults derived from p.
struct TopologySpec {
  Topology kind = Topology::Band;
  int p = 30;
  std::uint64_t seed = 0;

  std::optional<double> edge_prob;   // random; default 3/p
  std::optional<int> groups;         // hub, cluster; default ceil(p/15)
  double within_prob = 0.6;          // cluster
  std::optional<int> bandwidth;      // band; default 3
  int ring_neighbors = 2;            // small-world, per side
  double rewire_prob = 0.1;          // small-world
  std::optional<int> core_size;      // core-periphery; default ceil(0.2*p)
};

namespace detail {

inline std::vector<int> group_starts(int p, int g) {
  // Consecutive groups, sizes as even as possible, earlier groups larger.
  std::vector<int> starts;
  const int base = p / g, extra = p % g;
  int pos = 0;
  for (int i = 0; i < g; ++i) {
    starts.push_back(pos);
    pos += base + (i < extra ? 1 : 0);
  }
  starts.push_back(p);
  return starts;
}

}  // namespace detail

/// Deterministic (in seed) generation of the seven supported structures.
inline EdgeSet generate_structure(const TopologySpec& spec) {
  const int p = spec.p;
  if (p < 3) throw std::invalid_argument("generate_structure: p must be at least 3");
  rng::Engine eng(rng::mix(spec.seed));
  std::vector<std::pair<int, int>> edges;

  switch (spec.kind) {
    case Topology::ScaleFree: {
      // Barabasi-Albert with one attachment per new node: a tree on p nodes.
      std::vector<int> endpoints = {0, 1};
      edges.emplace_back(0, 1);
      for (int v = 2; v < p; ++v) {
        const int target = endpoints[rng::below(eng, endpoints.size())];
        edges.emplace_back(target, v);
        endpoints.push_back(target);
        endpoints.push_back(v);
      }
      break;
    }
    case Topology::Random: {
      const double prob = spec.edge_prob.value_or(3.0 / p);
      if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("generate_structure: edge_prob must lie in [0,1]");
      for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
          if (rng::uniform01(eng) < prob) edges.emplace_back(i, j);
        }
      }
      break;
    }
    case Topology::Hub: {
      const int g = spec.groups.value_or((p + 14) / 15);
      if (g < 1 || g > p / 2) throw std::invalid_argument("generate_structure: invalid group count");
      const auto starts = detail::group_starts(p, g);
      for (int b = 0; b < g; ++b) {
        const int hub = starts[b];
        for (int v = starts[b] + 1; v < starts[b + 1]; ++v) edges.emplace_back(hub, v);
      }
      break;
    }
    case Topology::Cluster: {
      const int g = spec.groups.value_or((p + 14) / 15);
      if (g < 1 || g > p / 2) throw std::invalid_argument("generate_structure: invalid group count");
      if (!(spec.within_prob >= 0.0 && spec.within_prob <= 1.0)) {
        throw std::invalid_argument("generate_structure: within_prob must lie in [0,1]");
      }
      const auto starts = detail::group_starts(p, g);
      for (int b = 0; b < g; ++b) {
        for (int i = starts[b]; i < starts[b + 1]; ++i) {
          for (int j = i + 1; j < starts[b + 1]; ++j) {
            if (rng::uniform01(eng) < spec.within_prob) edges.emplace_back(i, j);
          }
        }
      }
      break;
    }
    case Topology::Band: {
      const int bw = spec.bandwidth.value_or(3);
      if (bw < 1 || bw >= p) throw std::invalid_argument("generate_structure: bandwidth must lie in [1, p)");
      for (int i = 0; i < p; ++i) {
        for (int d = 1; d <= bw && i + d < p; ++d) edges.emplace_back(i, i + d);
      }
      break;
    }
    case Topology::SmallWorld: {
      const int k = spec.ring_neighbors;
      if (k < 1 || 2 * k > p - 1) throw std::invalid_argument("generate_structure: ring_neighbors infeasible");
      if (!(spec.rewire_prob >= 0.0 && spec.rewire_prob <= 1.0)) {
        throw std::invalid_argument("generate_structure: rewire_prob must lie in [0,1]");
      }
      // Watts-Strogatz: start from the ring lattice, then rewire each
      // rightward edge with probability rewire_prob.
      std::vector<std::vector<bool>> adj(p, std::vector<bool>(p, false));
      auto link = [&](int a, int b) { adj[a][b] = adj[b][a] = true; };
      for (int d = 1; d <= k; ++d) {
        for (int i = 0; i < p; ++i) link(i, (i + d) % p);
      }
      for (int d = 1; d <= k; ++d) {
        for (int i = 0; i < p; ++i) {
          const int j = (i + d) % p;
          if (rng::uniform01(eng) >= spec.rewire_prob) continue;
          // Pick a fresh endpoint; skip if node i already sees everyone.
          int degree_i = 0;
          for (int t = 0; t < p; ++t) degree_i += adj[i][t] ? 1 : 0;
          if (degree_i >= p - 1) continue;
          int target;
          do {
            target = static_cast<int>(rng::below(eng, p));
          } while (target == i || adj[i][target]);
          adj[i][j] = adj[j][i] = false;
          link(i, target);
        }
      }
      for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
          if (adj[i][j]) edges.emplace_back(i, j);
        }
      }
      break;
    }
    case Topology::CorePeriphery: {
      const int c = spec.core_size.value_or((p + 4) / 5);
      if (c < 2 || c > p) throw std::invalid_argument("generate_structure: core size must lie in [2, p]");
      for (int i = 0; i < c; ++i) {
        for (int j = i + 1; j < c; ++j) edges.emplace_back(i, j);
      }
      for (int v = c; v < p; ++v) {
        const int first = static_cast<int>(rng::below(eng, c));
        int second;
        do {
          second = static_cast<int>(rng::below(eng, c));
        } while (second == first);
        edges.emplace_back(first, v);
        edges.emplace_back(second, v);
      }
      break;
    }
  }
  return EdgeSet(p, std::move(edges));
}

/// Precision matrix from an adjacency pattern: Theta0 = v * A, then
/// Theta = Theta0 + (|lambda_min(Theta0)| + 0.1 + u) * I. Always positive
/// definite (smallest eigenvalue is 0.1 + u) and the off-diagonal zero
/// pattern equals the complement of the edge set.
inline SymMatrix structure_to_precision(const EdgeSet& edges, double v = 0.3, double u = 0.1) {
  if (!(v > 0.0)) throw std::invalid_argument("structure_to_precision: v must be positive");
  if (!(u >= 0.0)) throw std::invalid_argument("structure_to_precision: u must be nonnegative");
  const int p = edges.node_count();
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
  for (auto [i, j] : edges.edges()) {
    theta(i, j) = v;
    theta(j, i) = v;
  }
  double lambda_min = 0.0;
  if (!edges.empty()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(theta, Eigen::EigenvaluesOnly);
    lambda_min = eig.eigenvalues().minCoeff();
  }
  theta.diagonal().array() += std::abs(lambda_min) + 0.1 + u;
  return SymMatrix(std::move(theta));
}

/// Rows drawn i.i.d. from N(0, sigma) through the Cholesky factor.
inline Dataset sample_gaussian(const SymMatrix& sigma, int n, std::uint64_t seed) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma.mat());
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sample_gaussian: sigma is not positive definite");
  }
  const int p = sigma.dim();
  rng::Engine eng(rng::mix(seed));
  rng::NormalSampler normal(eng);
  Eigen::MatrixXd z(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(i, j) = normal();
  }
  Eigen::MatrixXd data = z * llt.matrixL().toDenseMatrix().transpose();
  return Dataset(std::move(data));
}

/// Adjacency, precision and covariance for one simulated scenario.
struct GroundTruth {
  EdgeSet adjacency;
  SymMatrix theta;
  SymMatrix sigma;
  TopologySpec spec;
};

inline GroundTruth make_ground_truth(const TopologySpec& spec, double v = 0.3, double u = 0.1) {
  EdgeSet adjacency = generate_structure(spec);
  SymMatrix theta = structure_to_precision(adjacency, v, u);
  Eigen::LLT<Eigen::MatrixXd> llt(theta.mat());
  SymMatrix sigma(llt.solve(Eigen::MatrixXd::Identity(spec.p, spec.p)).eval());
  return GroundTruth{std::move(adjacency), std::move(theta), std::move(sigma), spec};
}

}  // namespace ggmnet
