#pragma once

#include <string>

#include "amkl/objectives.hpp"
#include "amkl/rng.hpp"
#include "amkl/trace.hpp"

namespace amkl {

enum class SolverKind { bcd2, bcd3, bcd3_resnet, admm, mdlam };

const char* solver_kind_name(SolverKind kind);
SolverKind solver_kind_from_name(const std::string& name);

/// The objective each solver minimizes.
SplitForm form_for(SolverKind kind);

/// The step count of the solver's sufficient-decrease condition: 1 for the
/// monotone families, 2 for the box-relaxed one.
int nominal_j(SolverKind kind);

struct SolverConfig {
  SolverKind kind = SolverKind::bcd2;
  int max_iter = 1000;
  double prox_alpha = 1.0;        // initial proximal coefficient
  double backtrack_factor = 0.5;  // alpha grows by 1/backtrack_factor per retry
  double stop_dist_tol = 1e-8;
  bool record_block_diffs = true;
  bool forward_order = false;  // layer 1 first instead of layer N first

  void validate() const;  // throws ConfigError
};

enum class Termination { max_iter, dist_tol, stall };
const char* termination_name(Termination t);

struct SolverResult {
  ParamState state;
  IterTrace trace;
  Termination termination = Termination::max_iter;
};

/// Default initialization: weights are gaussian(scale 0.1), auxiliary blocks
/// come from a forward pass so every penalty term starts at zero.
ParamState initial_state(SplitForm form, const NetworkSpec& spec, const DataSet& data,
                         const Hyperparams& hyper, RandomSource& rng);

/// Runs full block cycles until the subgradient distance drops below
/// stop_dist_tol, max_iter cycles elapse, or the objective stalls (|change| <
/// 1e-15 for 50 consecutive cycles). Records (k, f, dist, block diffs) after
/// every cycle, k = 0 being the initial state. Throws DivergenceError with
/// the partial trace when a value turns non-finite or backtracking cannot
/// restore descent within 60 retries.
SolverResult run(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                 const SolverConfig& config, ParamState init_state,
                 const TraceSink& sink = nullptr);

}  // namespace amkl
