#include "amkl/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "amkl/errors.hpp"

namespace amkl {

const char* solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::bcd2: return "bcd2";
    case SolverKind::bcd3: return "bcd3";
    case SolverKind::bcd3_resnet: return "bcd3_resnet";
    case SolverKind::admm: return "admm";
    case SolverKind::mdlam: return "mdlam";
  }
  return "?";
}

SolverKind solver_kind_from_name(const std::string& name) {
  if (name == "bcd2") return SolverKind::bcd2;
  if (name == "bcd3") return SolverKind::bcd3;
  if (name == "bcd3_resnet") return SolverKind::bcd3_resnet;
  if (name == "admm") return SolverKind::admm;
  if (name == "mdlam") return SolverKind::mdlam;
  throw ConfigError("solver", "unknown solver '" + name + "'");
}

SplitForm form_for(SolverKind kind) {
  switch (kind) {
    case SolverKind::bcd2: return SplitForm::two_split_fnn;
    case SolverKind::bcd3: return SplitForm::three_split_fnn;
    case SolverKind::bcd3_resnet: return SplitForm::three_split_resnet;
    case SolverKind::admm: return SplitForm::admm_lagrangian;
    case SolverKind::mdlam: return SplitForm::mdlam;
  }
  throw std::logic_error("form_for: bad kind");
}

int nominal_j(SolverKind kind) { return kind == SolverKind::mdlam ? 2 : 1; }

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::max_iter: return "max_iter";
    case Termination::dist_tol: return "dist_tol";
    case Termination::stall: return "stall";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_iter < 1) throw ConfigError("solver_config.max_iter", "must be >= 1");
  if (!(prox_alpha > 0.0)) throw ConfigError("solver_config.prox_alpha", "must be > 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("solver_config.backtrack_factor", "must be in (0, 1)");
  }
  if (!(stop_dist_tol >= 0.0)) throw ConfigError("solver_config.stop_dist_tol", "must be >= 0");
}

ParamState initial_state(SplitForm form, const NetworkSpec& spec, const DataSet& data,
                         const Hyperparams& hyper, RandomSource& rng) {
  spec.validate();
  data.validate_against(spec);
  const int depth = spec.depth;
  ParamState state;
  state.form = form;
  for (int i = 1; i <= depth; ++i) {
    state.weights.push_back(gaussian_fill(rng, spec.dims[i], spec.dims[i - 1], 0.1));
  }
  switch (form) {
    case SplitForm::two_split_fnn: {
      Matrix prev = data.inputs;
      for (int i = 1; i <= depth; ++i) {
        prev = activation_apply(spec.activation(i), matmul(state.weights[i - 1], prev));
        state.states.push_back(prev);
      }
      break;
    }
    case SplitForm::three_split_fnn: {
      Matrix prev = data.inputs;
      for (int i = 1; i <= depth; ++i) {
        state.aux.push_back(matmul(state.weights[i - 1], prev));
        prev = activation_apply(spec.activation(i), state.aux.back());
        state.states.push_back(prev);
      }
      break;
    }
    case SplitForm::three_split_resnet: {
      Matrix prev = data.inputs;
      for (int i = 1; i <= depth; ++i) {
        state.aux.push_back(matmul(state.weights[i - 1], prev));
        prev = prev + activation_apply(spec.activation(i), state.aux.back());
        state.states.push_back(prev);
      }
      break;
    }
    case SplitForm::admm_lagrangian: {
      Matrix prev = data.inputs;
      for (int i = 1; i <= depth; ++i) {
        const Matrix z = matmul(state.weights[i - 1], prev);
        prev = (i < depth) ? activation_apply(spec.activation(i), z) : z;
        state.states.push_back(prev);
        state.duals.emplace_back(spec.dims[i], data.n());
      }
      state.anchors = state.states;
      break;
    }
    case SplitForm::mdlam: {
      Matrix prev = data.inputs;
      for (int i = 1; i <= depth; ++i) {
        const Matrix v = matmul(state.weights[i - 1], prev);
        state.states.push_back(v);
        if (i < depth) {
          // box center: feasible for any epsilon >= 0
          prev = activation_apply(spec.activation(i), v);
          state.aux.push_back(prev);
        }
      }
      break;
    }
  }
  validate_state(spec, data, hyper, state);
  return state;
}

namespace {

// W minimizing (c/2)||target - W basis||^2 + (decay/2)||W||^2.
Matrix solve_weight(double c, const Matrix& target, const Matrix& basis, double decay) {
  Matrix a = c * gram(basis);
  for (int i = 0; i < a.rows(); ++i) a(i, i) += decay;
  const Matrix rhs = c * matmul(basis, transpose(target));
  return transpose(solve_spd(a, rhs));
}

struct Runner {
  const NetworkSpec& spec;
  const DataSet& data;
  const Hyperparams& hyper;
  const SolverConfig& config;
  ParamState state;
  IterTrace trace;
  double f_curr = 0.0;

  int depth() const { return spec.depth; }

  double objective() const { return eval(spec, data, hyper, state); }

  const Matrix& vprev(int layer) const {
    return layer == 1 ? data.inputs : state.states[layer - 2];
  }
  const Matrix& uprev(int layer) const {
    return layer == 1 ? data.inputs : state.aux[layer - 2];
  }

  [[noreturn]] void diverge(const std::string& what) {
    throw DivergenceError(what + " (cycle " + std::to_string(trace.records.size()) + ")", trace);
  }

  // Nonsmooth part handled by the prox; smooth regularizers are already in
  // grad_block.
  Regularizer prox_reg(BlockId id) const {
    if (id.kind == BlockKind::weight && spec.weight_reg[id.layer - 1].kind == RegKind::ell1) {
      return spec.weight_reg[id.layer - 1];
    }
    if (id.kind == BlockKind::state && state.form != SplitForm::mdlam &&
        state.form != SplitForm::admm_lagrangian &&
        spec.state_reg[id.layer - 1].kind == RegKind::ell1) {
      return spec.state_reg[id.layer - 1];
    }
    return Regularizer::none();
  }

  // Proximal-linearized step with backtracking: candidates never increase the
  // objective; the coefficient doubles (1/backtrack_factor) until they don't.
  void prox_update(BlockId id) {
    const Regularizer reg = prox_reg(id);
    const Matrix g = grad_block(spec, data, hyper, state, id);
    if (!g.all_finite()) diverge("non-finite gradient at block " + block_name(state.form, id));
    const Matrix base = state.block(id);
    double alpha = config.prox_alpha;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Matrix cand = base - (1.0 / alpha) * g;
      if (reg.kind == RegKind::ell1) cand = regularizer_prox(reg, cand, 1.0 / alpha);
      state.block(id) = std::move(cand);
      const double f_new = objective();
      if (std::isfinite(f_new) && f_new <= f_curr) {
        f_curr = f_new;
        return;
      }
      alpha /= config.backtrack_factor;
    }
    state.block(id) = base;
    diverge("backtracking exhausted at block " + block_name(state.form, id));
  }

  // Exact one-block minimization; falls back to the proximal step when the
  // normal matrix is numerically singular.
  void closed_update(BlockId id, const std::function<Matrix()>& assemble) {
    const Matrix base = state.block(id);
    try {
      state.block(id) = assemble();
    } catch (const SingularError&) {
      state.block(id) = base;
      prox_update(id);
      return;
    }
    const double f_new = objective();
    if (!std::isfinite(f_new)) diverge("non-finite objective at block " + block_name(state.form, id));
    if (!(f_new <= f_curr + 1e-12 * (1.0 + std::fabs(f_curr)))) {
      diverge("exact block solve increased the objective at " + block_name(state.form, id));
    }
    f_curr = f_new;
  }

  std::vector<int> layer_order() const {
    std::vector<int> order;
    if (config.forward_order) {
      for (int i = 1; i <= depth(); ++i) order.push_back(i);
    } else {
      for (int i = depth(); i >= 1; --i) order.push_back(i);
    }
    return order;
  }

  bool linear_layer(int i) const { return spec.activation(i) == ActivationKind::identity; }
  double state_ridge(int i) const {
    return spec.state_reg[i - 1].kind == RegKind::squared_frobenius ? spec.state_reg[i - 1].lambda
                                                                    : 0.0;
  }
  double weight_decay(int i) const {
    return spec.weight_reg[i - 1].kind == RegKind::squared_frobenius
               ? spec.weight_reg[i - 1].lambda
               : 0.0;
  }

  // ---- per-solver cycles ----
  // A block gets the exact solve whenever its terms are quadratic (no
  // activation wraps it, i.e. the relevant layer is linear, and its
  // regularizer is smooth); everything else takes the proximal step.

  void cycle_bcd2() {
    const int n = data.n();
    for (int i : layer_order()) {
      const BlockId vid{BlockKind::state, i};
      const bool smooth_state = spec.state_reg[i - 1].kind != RegKind::ell1;
      if (i == depth() && spec.loss == LossKind::half_squared && smooth_state) {
        closed_update(vid, [&] {
          const Matrix act = activation_apply(spec.activation(i),
                                              matmul(state.weights[i - 1], vprev(i)));
          const double c0 = 1.0 / n + hyper.gamma + state_ridge(i);
          return (1.0 / c0) * ((1.0 / n) * data.labels + hyper.gamma * act);
        });
      } else if (i < depth() && linear_layer(i + 1) && smooth_state) {
        closed_update(vid, [&] {
          const Matrix& wnext = state.weights[i];
          Matrix a = hyper.gamma * gram(transpose(wnext));
          for (int r = 0; r < a.rows(); ++r) a(r, r) += hyper.gamma + state_ridge(i);
          const Matrix act = activation_apply(spec.activation(i),
                                              matmul(state.weights[i - 1], vprev(i)));
          const Matrix rhs =
              hyper.gamma * act + hyper.gamma * matmul(transpose(wnext), state.states[i]);
          return solve_spd(a, rhs);
        });
      } else {
        prox_update(vid);
      }
      const BlockId wid{BlockKind::weight, i};
      if (linear_layer(i) && spec.weight_reg[i - 1].kind != RegKind::ell1) {
        closed_update(wid, [&] {
          return solve_weight(hyper.gamma, state.states[i - 1], vprev(i), weight_decay(i));
        });
      } else {
        prox_update(wid);
      }
    }
  }

  void cycle_bcd3(bool residual) {
    const int n = data.n();
    for (int i : layer_order()) {
      const BlockId vid{BlockKind::state, i};
      if (spec.state_reg[i - 1].kind == RegKind::ell1 ||
          (i == depth() && spec.loss != LossKind::half_squared)) {
        prox_update(vid);
      } else if (i == depth()) {
        closed_update(vid, [&] {
          Matrix target = activation_apply(spec.activation(i), state.aux[i - 1]);
          if (residual) target = target + vprev(i);
          const double c0 = 1.0 / n + hyper.gamma + state_ridge(i);
          return (1.0 / c0) * ((1.0 / n) * data.labels + hyper.gamma * target);
        });
      } else {
        closed_update(vid, [&] {
          const Matrix& wnext = state.weights[i];
          const double diag = (residual ? 2.0 : 1.0) * hyper.gamma + state_ridge(i);
          Matrix a = hyper.gamma * gram(transpose(wnext));
          for (int r = 0; r < a.rows(); ++r) a(r, r) += diag;
          Matrix rhs = hyper.gamma * activation_apply(spec.activation(i), state.aux[i - 1]) +
                       hyper.gamma * matmul(transpose(wnext), state.aux[i]);
          if (residual) {
            rhs = rhs + hyper.gamma * vprev(i) +
                  hyper.gamma * (state.states[i] -
                                 activation_apply(spec.activation(i + 1), state.aux[i]));
          }
          return solve_spd(a, rhs);
        });
      }
      const BlockId uid{BlockKind::preact, i};
      if (linear_layer(i)) {
        closed_update(uid, [&] {
          Matrix target = state.states[i - 1];
          if (residual) target = target - vprev(i);
          return 0.5 * (target + matmul(state.weights[i - 1], vprev(i)));
        });
      } else {
        prox_update(uid);
      }
      const BlockId wid{BlockKind::weight, i};
      if (spec.weight_reg[i - 1].kind == RegKind::ell1) {
        prox_update(wid);
      } else {
        closed_update(wid, [&] {
          return solve_weight(hyper.gamma, state.aux[i - 1], vprev(i), weight_decay(i));
        });
      }
    }
  }

  Matrix admm_constraint(int i) const {
    const Matrix z = matmul(state.weights[i - 1], vprev(i));
    if (i < depth()) return activation_apply(spec.activation(i), z) - state.states[i - 1];
    return z - state.states[i - 1];
  }

  // Within a layer group the weight moves first and the exact state solve
  // comes last: with a forward sweep no later update touches layer i's
  // residual again, so the ascent step lands on the residual the V_i
  // stationarity bounds, which keeps the multipliers from winding up.
  void cycle_admm() {
    const int last = depth();
    // the loss pairs with V_N linearly, and so does any layer whose
    // activation is the identity (layer N has none by construction)
    auto couples_linearly = [&](int layer) { return layer == last || linear_layer(layer); };
    for (int i : layer_order()) {
      const BlockId wid{BlockKind::weight, i};
      if (couples_linearly(i)) {
        closed_update(wid, [&] {
          const Matrix& basis = vprev(i);
          Matrix a = hyper.beta[i - 1] * gram(basis);
          for (int r = 0; r < a.rows(); ++r) a(r, r) += hyper.lambda;
          const Matrix target = hyper.beta[i - 1] * state.states[i - 1] - state.duals[i - 1];
          return transpose(solve_spd(a, matmul(basis, transpose(target))));
        });
      } else {
        prox_update(wid);
      }
      const BlockId vid{BlockKind::state, i};
      if (i == last) {
        closed_update(vid, [&] {
          const Matrix z = matmul(state.weights[last - 1], vprev(last));
          const double c0 = 1.0 + hyper.beta[last - 1] + 2.0 * hyper.xi[last - 1];
          return (1.0 / c0) * (data.labels + state.duals[last - 1] +
                               hyper.beta[last - 1] * z +
                               (2.0 * hyper.xi[last - 1]) * state.anchors[last - 1]);
        });
      } else if (couples_linearly(i + 1)) {
        closed_update(vid, [&] {
          const Matrix& wnext = state.weights[i];
          Matrix a = hyper.beta[i] * gram(transpose(wnext));
          const double diag = hyper.beta[i - 1] + 2.0 * hyper.xi[i - 1];
          for (int r = 0; r < a.rows(); ++r) a(r, r) += diag;
          const Matrix act = activation_apply(
              spec.activation(i), matmul(state.weights[i - 1], vprev(i)));
          const Matrix rhs = state.duals[i - 1] + hyper.beta[i - 1] * act -
                             matmul(transpose(wnext), state.duals[i]) +
                             hyper.beta[i] * matmul(transpose(wnext), state.states[i]) +
                             (2.0 * hyper.xi[i - 1]) * state.anchors[i - 1];
          return solve_spd(a, rhs);
        });
      } else {
        prox_update(vid);
      }
    }
    // dual ascent, then refresh the anchors
    for (int i = 1; i <= last; ++i) {
      state.duals[i - 1] = state.duals[i - 1] + hyper.beta[i - 1] * admm_constraint(i);
    }
    for (int i = 1; i <= last; ++i) state.anchors[i - 1] = state.states[i - 1];
    f_curr = objective();
  }

  void cycle_mdlam() {
    for (int i : layer_order()) {
      const BlockId vid{BlockKind::state, i};
      if (i == depth()) {
        if (spec.loss == LossKind::half_squared) {
          closed_update(vid, [&] {
            const Matrix z = matmul(state.weights[i - 1], uprev(i));
            return (1.0 / (1.0 + hyper.gamma)) * (data.labels + hyper.gamma * z);
          });
        } else {
          prox_update(vid);
        }
      } else {
        // Exact minimizer of the only smooth term in v_i. This recenters the
        // box of u_i, so feasibility is restored by the u_i step right after;
        // no objective evaluation happens in between.
        state.states[i - 1] = matmul(state.weights[i - 1], uprev(i));
        const Matrix& wnext = state.weights[i];
        Matrix a = hyper.gamma * gram(transpose(wnext));
        for (int r = 0; r < a.rows(); ++r) a(r, r) += config.prox_alpha;
        const Matrix rhs = hyper.gamma * matmul(transpose(wnext), state.states[i]) +
                           config.prox_alpha * state.aux[i - 1];
        Matrix u = solve_spd(a, rhs);
        const ActivationKind act = spec.activation(i);
        const Matrix& v = state.states[i - 1];
        for (int r = 0; r < u.rows(); ++r) {
          for (int c = 0; c < u.cols(); ++c) {
            const double center = activation_value(act, v(r, c));
            u(r, c) = std::clamp(u(r, c), center - hyper.epsilon, center + hyper.epsilon);
          }
        }
        state.aux[i - 1] = std::move(u);
        // The projection may increase f: this is the non-monotone step.
        f_curr = objective();
        if (!std::isfinite(f_curr)) diverge("non-finite objective after box projection");
      }
      const BlockId wid{BlockKind::weight, i};
      if (spec.weight_reg[i - 1].kind == RegKind::ell1) {
        prox_update(wid);
      } else {
        const double decay = spec.weight_reg[i - 1].kind == RegKind::squared_frobenius
                                 ? spec.weight_reg[i - 1].lambda
                                 : 0.0;
        closed_update(wid, [&] {
          return solve_weight(hyper.gamma, state.states[i - 1], uprev(i), decay);
        });
      }
    }
  }

  void cycle() {
    switch (config.kind) {
      case SolverKind::bcd2: cycle_bcd2(); break;
      case SolverKind::bcd3: cycle_bcd3(false); break;
      case SolverKind::bcd3_resnet: cycle_bcd3(true); break;
      case SolverKind::admm: cycle_admm(); break;
      case SolverKind::mdlam: cycle_mdlam(); break;
    }
  }
};

}  // namespace

SolverResult run(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                 const SolverConfig& config, ParamState init_state, const TraceSink& sink) {
  config.validate();
  if (init_state.form != form_for(config.kind)) {
    throw ConfigError("solver", std::string("solver ") + solver_kind_name(config.kind) +
                                    " expects form " + split_form_name(form_for(config.kind)));
  }
  validate_state(spec, data, hyper, init_state);
  check_feasible(spec, data, hyper, init_state);

  Runner runner{spec, data, hyper, config, std::move(init_state), {}, 0.0};
  const auto block_ids = blocks_of(runner.state.form, spec.depth);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_nanos = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                t0)
        .count();
  };

  auto record = [&](std::int64_t k, const ParamState* prev) {
    IterRecord rec;
    rec.k = k;
    rec.f = runner.f_curr;
    rec.dist = subgrad_dist(spec, data, hyper, runner.state);
    if (!std::isfinite(rec.f) || !std::isfinite(rec.dist)) {
      runner.diverge("non-finite trace values");
    }
    if (config.record_block_diffs && prev != nullptr) {
      for (BlockId id : block_ids) {
        rec.block_diffs.emplace_back(block_name(runner.state.form, id),
                                     frob_norm(runner.state.block(id) - prev->block(id)));
      }
    }
    rec.wall_nanos = elapsed_nanos();
    runner.trace.records.push_back(rec);
    if (sink) sink(runner.trace.records.back());
  };

  runner.f_curr = runner.objective();
  record(0, nullptr);

  Termination reason = Termination::max_iter;
  int stall_count = 0;
  if (runner.trace.records.back().dist <= config.stop_dist_tol) {
    reason = Termination::dist_tol;
  } else {
    for (int k = 1; k <= config.max_iter; ++k) {
      const ParamState prev = runner.state;
      const double f_prev = runner.f_curr;
      runner.cycle();
      record(k, &prev);
      if (runner.trace.records.back().dist <= config.stop_dist_tol) {
        reason = Termination::dist_tol;
        break;
      }
      stall_count = std::fabs(runner.f_curr - f_prev) < 1e-15 ? stall_count + 1 : 0;
      if (stall_count >= 50) {
        reason = Termination::stall;
        break;
      }
    }
  }
  return SolverResult{std::move(runner.state), std::move(runner.trace), reason};
}

}  // namespace amkl
