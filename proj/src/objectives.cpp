#include "amkl/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "amkl/errors.hpp"
#include "amkl/numfmt.hpp"

namespace amkl {

const char* split_form_name(SplitForm form) {
  switch (form) {
    case SplitForm::two_split_fnn: return "two_split_fnn";
    case SplitForm::three_split_fnn: return "three_split_fnn";
    case SplitForm::admm_lagrangian: return "admm_lagrangian";
    case SplitForm::mdlam: return "mdlam";
    case SplitForm::three_split_resnet: return "three_split_resnet";
  }
  return "?";
}

SplitForm split_form_from_name(const std::string& name) {
  if (name == "two_split_fnn") return SplitForm::two_split_fnn;
  if (name == "three_split_fnn") return SplitForm::three_split_fnn;
  if (name == "admm_lagrangian") return SplitForm::admm_lagrangian;
  if (name == "mdlam") return SplitForm::mdlam;
  if (name == "three_split_resnet") return SplitForm::three_split_resnet;
  throw ConfigError("form", "unknown split form '" + name + "'");
}

void validate_hyper(SplitForm form, const NetworkSpec& spec, const Hyperparams& hyper) {
  const int depth = spec.depth;
  switch (form) {
    case SplitForm::two_split_fnn:
    case SplitForm::three_split_fnn:
    case SplitForm::three_split_resnet:
      if (!(hyper.gamma > 0.0)) throw ConfigError("hyper.gamma", "must be > 0");
      break;
    case SplitForm::mdlam:
      if (!(hyper.gamma > 0.0)) throw ConfigError("hyper.gamma", "must be > 0");
      if (!(hyper.epsilon >= 0.0)) throw ConfigError("hyper.epsilon", "must be >= 0");
      break;
    case SplitForm::admm_lagrangian:
      if (!(hyper.lambda >= 0.0)) throw ConfigError("hyper.lambda", "must be >= 0");
      if (hyper.beta.size() != static_cast<std::size_t>(depth)) {
        throw ConfigError("hyper.beta", "expected one entry per layer");
      }
      for (double b : hyper.beta) {
        if (!(b > 0.0)) throw ConfigError("hyper.beta", "entries must be > 0");
      }
      if (hyper.xi.size() != static_cast<std::size_t>(depth)) {
        throw ConfigError("hyper.xi", "expected one entry per layer");
      }
      for (double x : hyper.xi) {
        if (!(x >= 0.0)) throw ConfigError("hyper.xi", "entries must be >= 0");
      }
      break;
  }
}

std::string block_name(SplitForm form, BlockId id) {
  const std::string layer = std::to_string(id.layer);
  switch (id.kind) {
    case BlockKind::weight: return "W" + layer;
    case BlockKind::state: return (form == SplitForm::mdlam ? "v" : "V") + layer;
    case BlockKind::preact: return "U" + layer;
    case BlockKind::postact: return "u" + layer;
    case BlockKind::dual: return "Lam" + layer;
    case BlockKind::anchor: return "Vbar" + layer;
  }
  return "?";
}

namespace {

std::vector<Matrix>& vector_for(ParamState& state, BlockKind kind) {
  switch (kind) {
    case BlockKind::weight: return state.weights;
    case BlockKind::state: return state.states;
    case BlockKind::preact:
    case BlockKind::postact: return state.aux;
    case BlockKind::dual: return state.duals;
    case BlockKind::anchor: return state.anchors;
  }
  throw std::logic_error("bad block kind");
}

}  // namespace

Matrix& ParamState::block(BlockId id) {
  auto& vec = vector_for(*this, id.kind);
  if (id.layer < 1 || static_cast<std::size_t>(id.layer) > vec.size()) {
    throw std::invalid_argument("unknown block " + block_name(form, id) + " for form " +
                                split_form_name(form));
  }
  return vec[id.layer - 1];
}

const Matrix& ParamState::block(BlockId id) const {
  return const_cast<ParamState*>(this)->block(id);
}

std::vector<BlockId> blocks_of(SplitForm form, int depth) {
  std::vector<BlockId> ids;
  for (int i = 1; i <= depth; ++i) ids.push_back({BlockKind::weight, i});
  for (int i = 1; i <= depth; ++i) ids.push_back({BlockKind::state, i});
  switch (form) {
    case SplitForm::two_split_fnn: break;
    case SplitForm::three_split_fnn:
    case SplitForm::three_split_resnet:
      for (int i = 1; i <= depth; ++i) ids.push_back({BlockKind::preact, i});
      break;
    case SplitForm::mdlam:
      for (int i = 1; i < depth; ++i) ids.push_back({BlockKind::postact, i});
      break;
    case SplitForm::admm_lagrangian:
      for (int i = 1; i <= depth; ++i) ids.push_back({BlockKind::dual, i});
      for (int i = 1; i <= depth; ++i) ids.push_back({BlockKind::anchor, i});
      break;
  }
  return ids;
}

namespace {

// Validates network/form pairings that the printed formulas assume.
void validate_form_spec(SplitForm form, const NetworkSpec& spec) {
  spec.validate();
  const int depth = spec.depth;
  switch (form) {
    case SplitForm::admm_lagrangian:
      if (spec.loss != LossKind::half_squared) {
        throw ConfigError("loss", "the Lagrangian form fixes the half-squared output fit");
      }
      if (spec.activation(depth) != ActivationKind::identity) {
        throw ConfigError("activations", "the Lagrangian form has a linear last layer");
      }
      for (const auto& r : spec.weight_reg) {
        if (r.kind != RegKind::none) {
          throw ConfigError("weight_reg",
                            "the Lagrangian form carries its own weight decay (hyper.lambda)");
        }
      }
      for (const auto& r : spec.state_reg) {
        if (r.kind != RegKind::none) {
          throw ConfigError("state_reg", "the Lagrangian form has no state regularizers");
        }
      }
      break;
    case SplitForm::mdlam:
      if (spec.activation(depth) != ActivationKind::identity) {
        throw ConfigError("activations",
                          "the box-relaxed form applies the loss to the linear output v_N");
      }
      for (const auto& r : spec.state_reg) {
        if (r.kind != RegKind::none) {
          throw ConfigError("state_reg", "the box-relaxed form has no state regularizers");
        }
      }
      break;
    case SplitForm::three_split_resnet:
      for (int i = 1; i <= depth; ++i) {
        if (spec.dims[i] != spec.dims[0]) {
          throw ConfigError("dims", "the residual form needs equal widths across layers");
        }
      }
      break;
    default: break;
  }
}

const Matrix& state_prev(const NetworkSpec&, const DataSet& data, const ParamState& state,
                         int layer) {
  return layer == 1 ? data.inputs : state.states[layer - 2];
}

const Matrix& aux_prev(const NetworkSpec&, const DataSet& data, const ParamState& state,
                       int layer) {
  return layer == 1 ? data.inputs : state.aux[layer - 2];
}

void require_block_shape(const Matrix& m, int rows, int cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError("block " + name + " has shape " + m.shape_str() + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

void validate_state(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                    const ParamState& state) {
  validate_form_spec(state.form, spec);
  validate_hyper(state.form, spec, hyper);
  data.validate_against(spec);
  const int depth = spec.depth;
  const int n = data.n();

  auto expect_count = [&](const std::vector<Matrix>& vec, int count, const char* what) {
    if (vec.size() != static_cast<std::size_t>(count)) {
      throw ShapeError(std::string(what) + ": expected " + std::to_string(count) +
                       " blocks, got " + std::to_string(vec.size()));
    }
  };

  expect_count(state.weights, depth, "weights");
  expect_count(state.states, depth, "states");
  for (int i = 1; i <= depth; ++i) {
    require_block_shape(state.weights[i - 1], spec.dims[i], spec.dims[i - 1],
                        block_name(state.form, {BlockKind::weight, i}));
    require_block_shape(state.states[i - 1], spec.dims[i], n,
                        block_name(state.form, {BlockKind::state, i}));
  }
  switch (state.form) {
    case SplitForm::two_split_fnn:
      expect_count(state.aux, 0, "aux");
      expect_count(state.duals, 0, "duals");
      expect_count(state.anchors, 0, "anchors");
      break;
    case SplitForm::three_split_fnn:
    case SplitForm::three_split_resnet:
      expect_count(state.aux, depth, "pre-activations");
      expect_count(state.duals, 0, "duals");
      expect_count(state.anchors, 0, "anchors");
      for (int i = 1; i <= depth; ++i) {
        require_block_shape(state.aux[i - 1], spec.dims[i], n,
                            block_name(state.form, {BlockKind::preact, i}));
      }
      break;
    case SplitForm::mdlam:
      expect_count(state.aux, depth - 1, "box blocks");
      expect_count(state.duals, 0, "duals");
      expect_count(state.anchors, 0, "anchors");
      for (int i = 1; i < depth; ++i) {
        require_block_shape(state.aux[i - 1], spec.dims[i], n,
                            block_name(state.form, {BlockKind::postact, i}));
      }
      break;
    case SplitForm::admm_lagrangian:
      expect_count(state.aux, 0, "aux");
      expect_count(state.duals, depth, "duals");
      expect_count(state.anchors, depth, "anchors");
      for (int i = 1; i <= depth; ++i) {
        require_block_shape(state.duals[i - 1], spec.dims[i], n,
                            block_name(state.form, {BlockKind::dual, i}));
        require_block_shape(state.anchors[i - 1], spec.dims[i], n,
                            block_name(state.form, {BlockKind::anchor, i}));
      }
      break;
  }
}

void check_feasible(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                    const ParamState& state) {
  if (state.form != SplitForm::mdlam) return;
  const double slack = 1e-12;
  for (int i = 1; i < spec.depth; ++i) {
    const Matrix& u = state.aux[i - 1];
    const Matrix& v = state.states[i - 1];
    for (int r = 0; r < u.rows(); ++r) {
      for (int c = 0; c < u.cols(); ++c) {
        const double center = activation_value(spec.activation(i), v(r, c));
        const double lo = center - hyper.epsilon;
        const double hi = center + hyper.epsilon;
        const double val = u(r, c);
        if (val < lo - slack || val > hi + slack) {
          throw FeasibilityError("u" + std::to_string(i) + "(" + std::to_string(r) + "," +
                                 std::to_string(c) + ") = " + format_g17(val) +
                                 " outside [" + format_g17(lo) + ", " + format_g17(hi) + "]");
        }
      }
    }
  }
  (void)data;
}

namespace {

double sqnorm(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return acc;
}

using Terms = std::vector<std::pair<std::string, double>>;

Terms terms_two_split(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                      const ParamState& s) {
  Terms t;
  const int depth = spec.depth;
  const double inv_n = 1.0 / data.n();
  t.emplace_back("loss", inv_n * loss_eval(spec.loss, s.states[depth - 1], data.labels));
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("reg_W" + std::to_string(i),
                   regularizer_eval(spec.weight_reg[i - 1], s.weights[i - 1]));
  }
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("reg_V" + std::to_string(i),
                   regularizer_eval(spec.state_reg[i - 1], s.states[i - 1]));
  }
  for (int i = 1; i <= depth; ++i) {
    const Matrix z = matmul(s.weights[i - 1], state_prev(spec, data, s, i));
    const Matrix r = s.states[i - 1] - activation_apply(spec.activation(i), z);
    t.emplace_back("pen" + std::to_string(i), 0.5 * hyper.gamma * sqnorm(r));
  }
  return t;
}

Terms terms_three_split(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                        const ParamState& s, bool residual) {
  Terms t;
  const int depth = spec.depth;
  const double inv_n = 1.0 / data.n();
  t.emplace_back("loss", inv_n * loss_eval(spec.loss, s.states[depth - 1], data.labels));
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("reg_W" + std::to_string(i),
                   regularizer_eval(spec.weight_reg[i - 1], s.weights[i - 1]));
  }
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("reg_V" + std::to_string(i),
                   regularizer_eval(spec.state_reg[i - 1], s.states[i - 1]));
  }
  for (int i = 1; i <= depth; ++i) {
    Matrix r = s.states[i - 1] - activation_apply(spec.activation(i), s.aux[i - 1]);
    if (residual) r = r - state_prev(spec, data, s, i);
    t.emplace_back("pen_state" + std::to_string(i), 0.5 * hyper.gamma * sqnorm(r));
  }
  for (int i = 1; i <= depth; ++i) {
    const Matrix q = s.aux[i - 1] - matmul(s.weights[i - 1], state_prev(spec, data, s, i));
    t.emplace_back("pen_pre" + std::to_string(i), 0.5 * hyper.gamma * sqnorm(q));
  }
  return t;
}

Terms terms_admm(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                 const ParamState& s) {
  Terms t;
  const int depth = spec.depth;
  t.emplace_back("loss", 0.5 * sqnorm(s.states[depth - 1] - data.labels));
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("decay" + std::to_string(i), 0.5 * hyper.lambda * sqnorm(s.weights[i - 1]));
  }
  auto constraint = [&](int i) {
    const Matrix z = matmul(s.weights[i - 1], state_prev(spec, data, s, i));
    if (i < depth) return activation_apply(spec.activation(i), z) - s.states[i - 1];
    return z - s.states[i - 1];
  };
  for (int i = 1; i < depth; ++i) {
    t.emplace_back("pair" + std::to_string(i), frob_inner(s.duals[i - 1], constraint(i)));
  }
  for (int i = 1; i < depth; ++i) {
    t.emplace_back("aug" + std::to_string(i), 0.5 * hyper.beta[i - 1] * sqnorm(constraint(i)));
  }
  t.emplace_back("pair" + std::to_string(depth),
                 frob_inner(s.duals[depth - 1], constraint(depth)));
  t.emplace_back("aug" + std::to_string(depth),
                 0.5 * hyper.beta[depth - 1] * sqnorm(constraint(depth)));
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("anchor" + std::to_string(i),
                   hyper.xi[i - 1] * sqnorm(s.states[i - 1] - s.anchors[i - 1]));
  }
  return t;
}

Terms terms_mdlam(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                  const ParamState& s) {
  Terms t;
  const int depth = spec.depth;
  t.emplace_back("loss", loss_eval(spec.loss, s.states[depth - 1], data.labels));
  for (int i = 1; i <= depth; ++i) {
    t.emplace_back("reg_W" + std::to_string(i),
                   regularizer_eval(spec.weight_reg[i - 1], s.weights[i - 1]));
  }
  for (int i = 1; i <= depth; ++i) {
    const Matrix r = s.states[i - 1] - matmul(s.weights[i - 1], aux_prev(spec, data, s, i));
    t.emplace_back("pen" + std::to_string(i), 0.5 * hyper.gamma * sqnorm(r));
  }
  return t;
}

}  // namespace

std::vector<std::pair<std::string, double>> eval_terms(const NetworkSpec& spec,
                                                       const DataSet& data,
                                                       const Hyperparams& hyper,
                                                       const ParamState& state) {
  validate_state(spec, data, hyper, state);
  switch (state.form) {
    case SplitForm::two_split_fnn: return terms_two_split(spec, data, hyper, state);
    case SplitForm::three_split_fnn: return terms_three_split(spec, data, hyper, state, false);
    case SplitForm::three_split_resnet: return terms_three_split(spec, data, hyper, state, true);
    case SplitForm::admm_lagrangian: return terms_admm(spec, data, hyper, state);
    case SplitForm::mdlam:
      check_feasible(spec, data, hyper, state);
      return terms_mdlam(spec, data, hyper, state);
  }
  throw std::logic_error("eval_terms: bad form");
}

double eval(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
            const ParamState& state) {
  double total = 0.0;
  for (const auto& [name, value] : eval_terms(spec, data, hyper, state)) total += value;
  return total;
}

namespace {

Matrix smooth_reg_grad(const Regularizer& reg, const Matrix& w, Matrix grad) {
  if (reg.kind == RegKind::squared_frobenius) grad = grad + reg.lambda * w;
  return grad;
}

Matrix grad_two_split(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                      const ParamState& s, BlockId id) {
  const int depth = spec.depth;
  const int i = id.layer;
  const double inv_n = 1.0 / data.n();
  auto resid = [&](int layer) {  // V_layer - sigma(W_layer V_{layer-1})
    const Matrix z = matmul(s.weights[layer - 1], state_prev(spec, data, s, layer));
    return s.states[layer - 1] - activation_apply(spec.activation(layer), z);
  };
  if (id.kind == BlockKind::weight) {
    const Matrix& prev = state_prev(spec, data, s, i);
    const Matrix z = matmul(s.weights[i - 1], prev);
    const Matrix chain = hadamard(resid(i), activation_derivative(spec.activation(i), z));
    Matrix g = -hyper.gamma * matmul(chain, transpose(prev));
    return smooth_reg_grad(spec.weight_reg[i - 1], s.weights[i - 1], std::move(g));
  }
  if (id.kind == BlockKind::state) {
    Matrix g = hyper.gamma * resid(i);
    if (i < depth) {
      const Matrix z = matmul(s.weights[i], s.states[i - 1]);
      const Matrix chain =
          hadamard(resid(i + 1), activation_derivative(spec.activation(i + 1), z));
      g = g - hyper.gamma * matmul(transpose(s.weights[i]), chain);
    }
    if (i == depth) {
      g = g + inv_n * loss_grad(spec.loss, s.states[depth - 1], data.labels);
    }
    return smooth_reg_grad(spec.state_reg[i - 1], s.states[i - 1], std::move(g));
  }
  throw std::invalid_argument("unknown block " + block_name(s.form, id) + " for form " +
                              split_form_name(s.form));
}

Matrix grad_three_split(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                        const ParamState& s, BlockId id, bool residual) {
  const int depth = spec.depth;
  const int i = id.layer;
  const double inv_n = 1.0 / data.n();
  auto p_resid = [&](int layer) {  // V - sigma(U) (- V_prev for the residual form)
    Matrix r = s.states[layer - 1] - activation_apply(spec.activation(layer), s.aux[layer - 1]);
    if (residual) r = r - state_prev(spec, data, s, layer);
    return r;
  };
  auto q_resid = [&](int layer) {  // U - W V_prev
    return s.aux[layer - 1] - matmul(s.weights[layer - 1], state_prev(spec, data, s, layer));
  };
  switch (id.kind) {
    case BlockKind::weight: {
      Matrix g = -hyper.gamma * matmul(q_resid(i), transpose(state_prev(spec, data, s, i)));
      return smooth_reg_grad(spec.weight_reg[i - 1], s.weights[i - 1], std::move(g));
    }
    case BlockKind::preact: {
      const Matrix du = activation_derivative(spec.activation(i), s.aux[i - 1]);
      return -hyper.gamma * hadamard(p_resid(i), du) + hyper.gamma * q_resid(i);
    }
    case BlockKind::state: {
      Matrix g = hyper.gamma * p_resid(i);
      if (i < depth) {
        g = g - hyper.gamma * matmul(transpose(s.weights[i]), q_resid(i + 1));
        if (residual) g = g - hyper.gamma * p_resid(i + 1);
      }
      if (i == depth) {
        g = g + inv_n * loss_grad(spec.loss, s.states[depth - 1], data.labels);
      }
      return smooth_reg_grad(spec.state_reg[i - 1], s.states[i - 1], std::move(g));
    }
    default:
      throw std::invalid_argument("unknown block " + block_name(s.form, id) + " for form " +
                                  split_form_name(s.form));
  }
}

Matrix grad_admm(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                 const ParamState& s, BlockId id) {
  const int depth = spec.depth;
  const int i = id.layer;
  auto preact = [&](int layer) { return matmul(s.weights[layer - 1], state_prev(spec, data, s, layer)); };
  auto constraint = [&](int layer) {
    const Matrix z = preact(layer);
    if (layer < depth) return activation_apply(spec.activation(layer), z) - s.states[layer - 1];
    return z - s.states[layer - 1];
  };
  auto multiplier = [&](int layer) {  // Lambda + beta * constraint
    return s.duals[layer - 1] + hyper.beta[layer - 1] * constraint(layer);
  };
  switch (id.kind) {
    case BlockKind::weight: {
      const Matrix& prev = state_prev(spec, data, s, i);
      Matrix chain = multiplier(i);
      if (i < depth) {
        chain = hadamard(chain, activation_derivative(spec.activation(i), preact(i)));
      }
      return matmul(chain, transpose(prev)) + hyper.lambda * s.weights[i - 1];
    }
    case BlockKind::state: {
      Matrix g = -1.0 * multiplier(i);
      if (i < depth) {
        Matrix chain = multiplier(i + 1);
        if (i + 1 < depth) {
          chain = hadamard(chain, activation_derivative(spec.activation(i + 1), preact(i + 1)));
        }
        g = g + matmul(transpose(s.weights[i]), chain);
      }
      if (i == depth) g = g + (s.states[depth - 1] - data.labels);
      g = g + (2.0 * hyper.xi[i - 1]) * (s.states[i - 1] - s.anchors[i - 1]);
      return g;
    }
    case BlockKind::dual: return constraint(i);
    case BlockKind::anchor: return (-2.0 * hyper.xi[i - 1]) * (s.states[i - 1] - s.anchors[i - 1]);
    default:
      throw std::invalid_argument("unknown block " + block_name(s.form, id) + " for form " +
                                  split_form_name(s.form));
  }
}

Matrix grad_mdlam(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                  const ParamState& s, BlockId id) {
  const int depth = spec.depth;
  const int i = id.layer;
  auto t_resid = [&](int layer) {  // v - W u_prev
    return s.states[layer - 1] - matmul(s.weights[layer - 1], aux_prev(spec, data, s, layer));
  };
  switch (id.kind) {
    case BlockKind::weight: {
      Matrix g =
          -hyper.gamma * matmul(t_resid(i), transpose(aux_prev(spec, data, s, i)));
      return smooth_reg_grad(spec.weight_reg[i - 1], s.weights[i - 1], std::move(g));
    }
    case BlockKind::state: {
      Matrix g = hyper.gamma * t_resid(i);
      if (i == depth) g = g + loss_grad(spec.loss, s.states[depth - 1], data.labels);
      return g;
    }
    case BlockKind::postact: {
      if (i >= depth) break;
      return -hyper.gamma * matmul(transpose(s.weights[i]), t_resid(i + 1));
    }
    default: break;
  }
  throw std::invalid_argument("unknown block " + block_name(s.form, id) + " for form " +
                              split_form_name(s.form));
}

}  // namespace

Matrix grad_block(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                  const ParamState& state, BlockId id) {
  switch (state.form) {
    case SplitForm::two_split_fnn: return grad_two_split(spec, data, hyper, state, id);
    case SplitForm::three_split_fnn:
      return grad_three_split(spec, data, hyper, state, id, false);
    case SplitForm::three_split_resnet:
      return grad_three_split(spec, data, hyper, state, id, true);
    case SplitForm::admm_lagrangian: return grad_admm(spec, data, hyper, state, id);
    case SplitForm::mdlam: return grad_mdlam(spec, data, hyper, state, id);
  }
  throw std::logic_error("grad_block: bad form");
}

double subgrad_dist(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                    const ParamState& state) {
  validate_state(spec, data, hyper, state);
  check_feasible(spec, data, hyper, state);
  const double boundary_tol = 1e-12;
  double acc = 0.0;
  for (BlockId id : blocks_of(state.form, spec.depth)) {
    const Matrix g = grad_block(spec, data, hyper, state, id);
    const Regularizer* nonsmooth = nullptr;
    if (id.kind == BlockKind::weight && spec.weight_reg[id.layer - 1].kind == RegKind::ell1) {
      nonsmooth = &spec.weight_reg[id.layer - 1];
    }
    if (id.kind == BlockKind::state && state.form != SplitForm::mdlam &&
        state.form != SplitForm::admm_lagrangian &&
        spec.state_reg[id.layer - 1].kind == RegKind::ell1) {
      nonsmooth = &spec.state_reg[id.layer - 1];
    }
    if (nonsmooth != nullptr) {
      const double d = regularizer_min_norm_dist(*nonsmooth, state.block(id), g);
      acc += d * d;
      continue;
    }
    if (id.kind == BlockKind::postact) {
      // Project the gradient onto the tangent cone of the box: components
      // pushing outward at an active bound are dropped.
      const Matrix& u = state.aux[id.layer - 1];
      const Matrix& v = state.states[id.layer - 1];
      const ActivationKind act = spec.activation(id.layer);
      for (int r = 0; r < u.rows(); ++r) {
        for (int c = 0; c < u.cols(); ++c) {
          const double center = activation_value(act, v(r, c));
          const bool at_upper = std::fabs(u(r, c) - (center + hyper.epsilon)) <= boundary_tol;
          const bool at_lower = std::fabs(u(r, c) - (center - hyper.epsilon)) <= boundary_tol;
          double kept = g(r, c);
          if (at_upper && at_lower) {
            kept = 0.0;
          } else if (at_upper && kept > 0.0) {
            kept = 0.0;
          } else if (at_lower && kept < 0.0) {
            kept = 0.0;
          }
          acc += kept * kept;
        }
      }
      continue;
    }
    for (double v : g.data()) acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace amkl
