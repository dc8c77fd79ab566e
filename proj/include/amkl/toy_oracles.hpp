#pragma once

#include "amkl/kl_diagnostics.hpp"
#include "amkl/trace.hpp"

namespace amkl {

/// One-dimensional test problem f(x) = |x|^p with minimizer 0. The sharpness
/// exponent is known exactly: (|x|^p)^theta <= c * p|x|^{p-1} holds with
/// theta = 1 - 1/p and c = 1/p, so these problems are exact ground truth for
/// every estimator in kl_diagnostics.
struct ToyProblem {
  double p = 2.0;  // >= 1

  double theta_analytic() const { return 1.0 - 1.0 / p; }
  double fstar() const { return 0.0; }
};

KLParams analytic_kl_params(const ToyProblem& problem);

enum class ToyIterKind { gradient_descent, proximal_point, two_phase };

/// two_phase multiplies x by (1 + bump) on odd steps and applies two gradient
/// steps on even steps: per-step increases, two-step contraction.
struct ToyIterator {
  ToyIterKind kind = ToyIterKind::gradient_descent;
  double step = 0.25;  // > 0
  double bump = 0.05;  // >= 0, two_phase only
};

/// Iterates from x0 and records k = 0..steps with the exact analytic values
/// f_k = |x_k|^p and dist_k = p |x_k|^{p-1} (0 at x = 0 for every p; the
/// minimum-norm subgradient of |.| at 0 is 0). The per-step |x_k - x_{k-1}|
/// goes into block_diffs under "x".
///
/// Rejected parameter combinations (StabilityError):
///  - gradient_descent with p < 2 (the gradient is non-Lipschitz at 0) or
///    with step * p * |x0|^{p-2} >= 1 (the first factor would leave (0, 1));
///  - two_phase with p != 2 or (1 + bump) * (1 - 2 step)^2 >= 1 (the two-step
///    contraction that makes the pair condition hold by design);
///  - proximal_point with step <= 0.
IterTrace run_toy(const ToyProblem& problem, const ToyIterator& iterator, double x0, int steps);

}  // namespace amkl
