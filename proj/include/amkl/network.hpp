#pragma once

#include <string>
#include <vector>

#include "amkl/matrix.hpp"

namespace amkl {

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class ActivationKind { identity, tanh, sigmoid, relu };

double activation_value(ActivationKind kind, double x);
/// Pointwise derivative; relu uses the convention slope(0) = 0 so traces stay
/// deterministic.
double activation_slope(ActivationKind kind, double x);

Matrix activation_apply(ActivationKind kind, const Matrix& z);
Matrix activation_derivative(ActivationKind kind, const Matrix& z);

const char* activation_name(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

enum class LossKind { half_squared, logistic };

/// half_squared: 1/2 ||v - y||^2 summed over all entries.
/// logistic: sum of log(1 + exp(-y*v)) per entry, labels restricted to +-1;
/// evaluated through log1p so large margins do not overflow.
double loss_eval(LossKind kind, const Matrix& v, const Matrix& y);
Matrix loss_grad(LossKind kind, const Matrix& v, const Matrix& y);

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Regularizers
// ---------------------------------------------------------------------------

enum class RegKind { none, squared_frobenius, ell1 };

struct Regularizer {
  RegKind kind = RegKind::none;
  double lambda = 0.0;

  static Regularizer none() { return {}; }
  static Regularizer squared_frobenius(double lambda) {
    return {RegKind::squared_frobenius, lambda};
  }
  static Regularizer ell1(double lambda) { return {RegKind::ell1, lambda}; }

  bool smooth() const { return kind != RegKind::ell1; }
};

double regularizer_eval(const Regularizer& reg, const Matrix& w);

/// prox_{t r}(w) = argmin_p t r(p) + 1/2 ||p - w||^2, t > 0.
Matrix regularizer_prox(const Regularizer& reg, const Matrix& w, double t);

/// min over s in the subdifferential of r at w of ||g_smooth + s||, where
/// g_smooth is the gradient of every smooth objective term with respect to w.
/// Zero exactly when -g_smooth is a subgradient of r at w.
double regularizer_min_norm_dist(const Regularizer& reg, const Matrix& w, const Matrix& g_smooth);

std::string regularizer_describe(const Regularizer& reg);

// ---------------------------------------------------------------------------
// Network and data descriptions
// ---------------------------------------------------------------------------

/// Layered dense network: layer i maps width dims[i-1] to dims[i] through
/// weights W_i and activation activations[i-1], i = 1..depth.
struct NetworkSpec {
  int depth = 0;                            // N
  std::vector<int> dims;                    // d_0 .. d_N
  std::vector<ActivationKind> activations;  // per layer, size N
  LossKind loss = LossKind::half_squared;
  std::vector<Regularizer> weight_reg;  // r_i, size N
  std::vector<Regularizer> state_reg;   // s_i, size N

  ActivationKind activation(int layer) const { return activations[layer - 1]; }
  int dim(int i) const { return dims[i]; }
  void validate() const;  // throws ConfigError
};

/// Uniform builder: hidden layers share one activation, the last layer gets
/// its own (typically identity), no regularizers.
NetworkSpec make_network_spec(const std::vector<int>& dims, ActivationKind hidden,
                              ActivationKind last, LossKind loss = LossKind::half_squared);

struct DataSet {
  Matrix inputs;  // d_0 x n
  Matrix labels;  // d_N x n

  int n() const { return inputs.cols(); }
  void validate_against(const NetworkSpec& spec) const;
};

}  // namespace amkl
