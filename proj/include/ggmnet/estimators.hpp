#pragma once

#include <stdexcept>
#include <string>

#include "ggmnet/cr_gelnet.hpp"
#include "ggmnet/gelnet.hpp"
#include "ggmnet/two_stage.hpp"
#include "ggmnet/types.hpp"

namespace ggmnet {

/// The six estimator variants compared in the simulation study. Glasso is
/// gelnet with alpha pinned to 1 (same code path, just a fixed mix).
enum class EstimatorKind { Gelnet, Glasso, CrL2, CrMinEl, TwoStageAnd, TwoStageOr };

inline std::string estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Gelnet: return "gelnet";
    case EstimatorKind::Glasso: return "glasso";
    case EstimatorKind::CrL2: return "cr-l2";
    case EstimatorKind::CrMinEl: return "cr-minel";
    case EstimatorKind::TwoStageAnd: return "2s-and";
    case EstimatorKind::TwoStageOr: return "2s-or";
  }
  throw std::logic_error("estimator_name: unknown kind");
}

inline EstimatorKind estimator_from_name(const std::string& s) {
  if (s == "gelnet") return EstimatorKind::Gelnet;
  if (s == "glasso") return EstimatorKind::Glasso;
  if (s == "cr-l2") return EstimatorKind::CrL2;
  if (s == "cr-minel") return EstimatorKind::CrMinEl;
  if (s == "2s-and") return EstimatorKind::TwoStageAnd;
  if (s == "2s-or") return EstimatorKind::TwoStageOr;
  throw std::invalid_argument("unknown estimator '" + s +
                              "' (valid: gelnet, glasso, cr-l2, cr-minel, 2s-and, 2s-or)");
}

/// True when the alpha axis of a grid is meaningful for this estimator.
inline bool estimator_uses_alpha(EstimatorKind k) { return k != EstimatorKind::Glasso; }

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::TwoStageAnd;
  GelnetConfig gelnet;
  EnetOptions enet;
  double mle_tol = 1e-6;
  int mle_max_sweeps = 500;
};

inline PenaltyParams effective_params(const EstimatorSpec& spec, const PenaltyParams& params) {
  return spec.kind == EstimatorKind::Glasso ? PenaltyParams(1.0, params.lambda) : params;
}

inline EstimationResult run_estimator(const EstimatorSpec& spec, const Dataset& data,
                                      const PenaltyParams& params) {
  const PenaltyParams eff = effective_params(spec, params);
  switch (spec.kind) {
    case EstimatorKind::Gelnet:
    case EstimatorKind::Glasso:
      return gelnet_estimate(data.sample_covariance(), eff, spec.gelnet);
    case EstimatorKind::CrL2:
      return cr_estimate(data, eff, SymmetrizeRule::L2, spec.enet);
    case EstimatorKind::CrMinEl:
      return cr_estimate(data, eff, SymmetrizeRule::MinEl, spec.enet);
    case EstimatorKind::TwoStageAnd:
    case EstimatorKind::TwoStageOr: {
      TwoStageConfig cfg{spec.enet, spec.mle_tol, spec.mle_max_sweeps};
      const EdgeRule rule = spec.kind == EstimatorKind::TwoStageAnd ? EdgeRule::And : EdgeRule::Or;
      return two_stage_estimate(data, eff, rule, cfg);
    }
  }
  throw std::logic_error("run_estimator: unknown kind");
}

}  // namespace ggmnet
