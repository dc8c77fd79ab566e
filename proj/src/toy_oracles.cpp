#include "amkl/toy_oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "amkl/errors.hpp"

namespace amkl {

KLParams analytic_kl_params(const ToyProblem& problem) {
  if (!(problem.p >= 1.0)) throw std::invalid_argument("analytic_kl_params: p must be >= 1");
  KLParams kl;
  kl.theta = problem.theta_analytic();
  kl.c = 1.0 / problem.p;
  kl.tau = std::nullopt;  // unbounded
  kl.fstar = 0.0;
  return kl;
}

namespace {

double toy_value(double p, double x) { return std::pow(std::fabs(x), p); }

double toy_dist(double p, double x) {
  if (x == 0.0) return 0.0;
  return p * std::pow(std::fabs(x), p - 1.0);
}

double gradient_step(double p, double t, double x) {
  if (x == 0.0) return 0.0;
  // x - t p sign(x) |x|^{p-1}, written as a contraction of x
  return x * (1.0 - t * p * std::pow(std::fabs(x), p - 2.0));
}

// prox_{t |.|^p}(x): soft-threshold for p = 1, linear shrink for p = 2, and a
// bisection solve of u + t p u^{p-1} = |x| otherwise (monotone in u).
double prox_step(double p, double t, double x) {
  if (p == 1.0) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
  }
  if (p == 2.0) return x / (1.0 + 2.0 * t);
  const double target = std::fabs(x);
  if (target == 0.0) return 0.0;
  double lo = 0.0;
  double hi = target;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double g = mid + t * p * std::pow(mid, p - 1.0) - target;
    if (g > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double mag = 0.5 * (lo + hi);
  return x >= 0.0 ? mag : -mag;
}

}  // namespace

IterTrace run_toy(const ToyProblem& problem, const ToyIterator& iterator, double x0, int steps) {
  const double p = problem.p;
  if (!(p >= 1.0)) throw std::invalid_argument("run_toy: p must be >= 1");
  if (steps < 0) throw std::invalid_argument("run_toy: steps must be >= 0");
  const double t = iterator.step;
  if (!(t > 0.0)) throw StabilityError("run_toy: step must be > 0");

  switch (iterator.kind) {
    case ToyIterKind::gradient_descent:
      if (p < 2.0) {
        throw StabilityError("run_toy: gradient descent needs p >= 2 (use proximal_point)");
      }
      if (!(t * p * std::pow(std::fabs(x0), p - 2.0) < 1.0)) {
        throw StabilityError("run_toy: step too large, iteration would not contract");
      }
      break;
    case ToyIterKind::two_phase:
      if (p != 2.0) throw StabilityError("run_toy: two_phase is defined for p = 2");
      if (!(iterator.bump >= 0.0)) throw StabilityError("run_toy: bump must be >= 0");
      if (!(t < 0.5)) throw StabilityError("run_toy: two_phase needs step < 1/2");
      if (!((1.0 + iterator.bump) * (1.0 - 2.0 * t) * (1.0 - 2.0 * t) < 1.0)) {
        throw StabilityError("run_toy: bump defeats the two-step contraction");
      }
      break;
    case ToyIterKind::proximal_point: break;
  }

  IterTrace trace;
  double x = x0;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      const double x_old = x;
      switch (iterator.kind) {
        case ToyIterKind::gradient_descent: x = gradient_step(p, t, x); break;
        case ToyIterKind::proximal_point: x = prox_step(p, t, x); break;
        case ToyIterKind::two_phase:
          if (k % 2 == 1) {
            x *= 1.0 + iterator.bump;
          } else {
            x = gradient_step(p, t, gradient_step(p, t, x));
          }
          break;
      }
      IterRecord rec;
      rec.k = k;
      rec.f = toy_value(p, x);
      rec.dist = toy_dist(p, x);
      rec.block_diffs.emplace_back("x", std::fabs(x - x_old));
      trace.records.push_back(std::move(rec));
    } else {
      IterRecord rec;
      rec.k = 0;
      rec.f = toy_value(p, x);
      rec.dist = toy_dist(p, x);
      trace.records.push_back(std::move(rec));
    }
  }
  return trace;
}

}  // namespace amkl
