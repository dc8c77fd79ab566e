#pragma once

#include <string>
#include <utility>
#include <vector>

#include "amkl/network.hpp"

namespace amkl {

/// The five layer-splitting objectives. Each tag fixes the block set of the
/// variable tuple and the exact terms that are summed.
enum class SplitForm {
  two_split_fnn,      // penalties ||V_i - sigma_i(W_i V_{i-1})||^2
  three_split_fnn,    // adds pre-activations U_i = W_i V_{i-1}
  admm_lagrangian,    // augmented Lagrangian with duals and anchors
  mdlam,              // box-relaxed activations, u_i in [sigma(v_i) +- eps]
  three_split_resnet  // residual connections V_i - V_{i-1} = sigma_i(U_i)
};

const char* split_form_name(SplitForm form);
SplitForm split_form_from_name(const std::string& name);

struct Hyperparams {
  double gamma = 1.0;       // quadratic penalty weight
  double lambda = 0.0;      // weight decay of the Lagrangian form
  std::vector<double> beta; // augmentation weights, one per layer
  std::vector<double> xi;   // anchor proximity weights, one per layer
  double epsilon = 0.0;     // half-width of the activation box
};

void validate_hyper(SplitForm form, const NetworkSpec& spec, const Hyperparams& hyper);

enum class BlockKind {
  weight,   // W_i
  state,    // V_i, or the pre-activation v_i of the box-relaxed form
  preact,   // U_i of the three-splitting forms
  postact,  // u_i of the box-relaxed form, i = 1..N-1
  dual,     // Lambda_i
  anchor    // Vbar_i
};

struct BlockId {
  BlockKind kind;
  int layer;  // 1-based

  bool operator==(const BlockId& other) const = default;
};

std::string block_name(SplitForm form, BlockId id);

/// The full variable tuple of one splitting form. Which vectors are populated
/// depends on the form; `blocks_of` enumerates the live blocks.
struct ParamState {
  SplitForm form = SplitForm::two_split_fnn;
  std::vector<Matrix> weights;  // W_1..W_N
  std::vector<Matrix> states;   // V_1..V_N (v_1..v_N for the box form)
  std::vector<Matrix> aux;      // U_1..U_N, or u_1..u_{N-1} for the box form
  std::vector<Matrix> duals;    // Lambda_1..Lambda_N (Lagrangian form only)
  std::vector<Matrix> anchors;  // Vbar_1..Vbar_N (Lagrangian form only)

  Matrix& block(BlockId id);
  const Matrix& block(BlockId id) const;
};

/// Canonical block enumeration of a form (weights, states, then the rest,
/// each in layer order). Fixed: trace columns and distance sums follow it.
std::vector<BlockId> blocks_of(SplitForm form, int depth);

/// Shape-checks the state against the network description; throws ShapeError. For the
/// residual form also requires equal widths across layers (the residual
/// difference V_i - V_{i-1} is undefined otherwise).
void validate_state(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                    const ParamState& state);

/// Box feasibility of the relaxed form, checked entrywise with slack 1e-12.
/// Throws FeasibilityError naming the first offending entry.
void check_feasible(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                    const ParamState& state);

/// Objective value, term by term in the order the formula is written. The
/// total is the left-to-right sum of the returned terms.
std::vector<std::pair<std::string, double>> eval_terms(const NetworkSpec& spec,
                                                       const DataSet& data,
                                                       const Hyperparams& hyper,
                                                       const ParamState& state);

double eval(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
            const ParamState& state);

/// Partial gradient of every smooth term (losses, penalties, pairings and
/// smooth regularizers) with respect to one block. ell1 terms are excluded;
/// they enter through regularizer_min_norm_dist.
Matrix grad_block(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                  const ParamState& state, BlockId id);

/// dist(0, subdifferential of f) computed blockwise: smooth blocks contribute
/// their squared gradient norm, ell1-regularized blocks the squared min-norm
/// subgradient distance, and box-constrained blocks the squared norm of the
/// gradient projected onto the tangent cone of the box (outward-pushing
/// components at a boundary are dropped; boundary detection tolerance 1e-12).
double subgrad_dist(const NetworkSpec& spec, const DataSet& data, const Hyperparams& hyper,
                    const ParamState& state);

}  // namespace amkl
