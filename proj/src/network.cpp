#include "amkl/network.hpp"

#include <cmath>
#include <stdexcept>

#include "amkl/errors.hpp"
#include "amkl/numfmt.hpp"

namespace amkl {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow for large t.
double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace

double activation_value(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::identity: return x;
    case ActivationKind::tanh: return std::tanh(x);
    case ActivationKind::sigmoid: return stable_sigmoid(x);
    case ActivationKind::relu: return x > 0.0 ? x : 0.0;
  }
  throw std::logic_error("activation_value: bad kind");
}

double activation_slope(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::identity: return 1.0;
    case ActivationKind::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::sigmoid: {
      const double s = stable_sigmoid(x);
      return s * (1.0 - s);
    }
    case ActivationKind::relu: return x > 0.0 ? 1.0 : 0.0;
  }
  throw std::logic_error("activation_slope: bad kind");
}

Matrix activation_apply(ActivationKind kind, const Matrix& z) {
  Matrix out = z;
  for (double& v : out.data()) v = activation_value(kind, v);
  return out;
}

Matrix activation_derivative(ActivationKind kind, const Matrix& z) {
  Matrix out = z;
  for (double& v : out.data()) v = activation_slope(kind, v);
  return out;
}

const char* activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::relu: return "relu";
  }
  return "?";
}

ActivationKind activation_from_name(const std::string& name) {
  if (name == "identity") return ActivationKind::identity;
  if (name == "tanh") return ActivationKind::tanh;
  if (name == "sigmoid") return ActivationKind::sigmoid;
  if (name == "relu") return ActivationKind::relu;
  throw ConfigError("activations", "unknown activation '" + name + "'");
}

double loss_eval(LossKind kind, const Matrix& v, const Matrix& y) {
  if (!v.same_shape(y)) {
    throw ShapeError("loss_eval: shape mismatch " + v.shape_str() + " vs " + y.shape_str());
  }
  double acc = 0.0;
  switch (kind) {
    case LossKind::half_squared:
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v.data()[i] - y.data()[i];
        acc += 0.5 * d * d;
      }
      return acc;
    case LossKind::logistic:
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double label = y.data()[i];
        if (label != 1.0 && label != -1.0) {
          throw std::invalid_argument("loss_eval: logistic labels must be -1 or +1, got " +
                                      format_g17(label));
        }
        acc += softplus(-label * v.data()[i]);
      }
      return acc;
  }
  throw std::logic_error("loss_eval: bad kind");
}

Matrix loss_grad(LossKind kind, const Matrix& v, const Matrix& y) {
  if (!v.same_shape(y)) {
    throw ShapeError("loss_grad: shape mismatch " + v.shape_str() + " vs " + y.shape_str());
  }
  Matrix g = v;
  switch (kind) {
    case LossKind::half_squared:
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = v.data()[i] - y.data()[i];
      return g;
    case LossKind::logistic:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double label = y.data()[i];
        if (label != 1.0 && label != -1.0) {
          throw std::invalid_argument("loss_grad: logistic labels must be -1 or +1");
        }
        g.data()[i] = -label * stable_sigmoid(-label * v.data()[i]);
      }
      return g;
  }
  throw std::logic_error("loss_grad: bad kind");
}

const char* loss_name(LossKind kind) {
  return kind == LossKind::half_squared ? "half_squared" : "logistic";
}

LossKind loss_from_name(const std::string& name) {
  if (name == "half_squared") return LossKind::half_squared;
  if (name == "logistic") return LossKind::logistic;
  throw ConfigError("loss", "unknown loss '" + name + "'");
}

double regularizer_eval(const Regularizer& reg, const Matrix& w) {
  switch (reg.kind) {
    case RegKind::none: return 0.0;
    case RegKind::squared_frobenius: {
      double acc = 0.0;
      for (double v : w.data()) acc += v * v;
      return 0.5 * reg.lambda * acc;
    }
    case RegKind::ell1: {
      double acc = 0.0;
      for (double v : w.data()) acc += std::fabs(v);
      return reg.lambda * acc;
    }
  }
  throw std::logic_error("regularizer_eval: bad kind");
}

Matrix regularizer_prox(const Regularizer& reg, const Matrix& w, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("regularizer_prox: t must be > 0");
  switch (reg.kind) {
    case RegKind::none: return w;
    case RegKind::squared_frobenius: return (1.0 / (1.0 + reg.lambda * t)) * w;
    case RegKind::ell1: {
      const double thresh = reg.lambda * t;
      Matrix out = w;
      for (double& v : out.data()) {
        if (v > thresh) {
          v -= thresh;
        } else if (v < -thresh) {
          v += thresh;
        } else {
          v = 0.0;
        }
      }
      return out;
    }
  }
  throw std::logic_error("regularizer_prox: bad kind");
}

double regularizer_min_norm_dist(const Regularizer& reg, const Matrix& w,
                                 const Matrix& g_smooth) {
  if (!w.same_shape(g_smooth)) {
    throw ShapeError("regularizer_min_norm_dist: shape mismatch " + w.shape_str() + " vs " +
                     g_smooth.shape_str());
  }
  double acc = 0.0;
  switch (reg.kind) {
    case RegKind::none:
      for (double g : g_smooth.data()) acc += g * g;
      break;
    case RegKind::squared_frobenius:
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double s = g_smooth.data()[i] + reg.lambda * w.data()[i];
        acc += s * s;
      }
      break;
    case RegKind::ell1:
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double g = g_smooth.data()[i];
        const double v = w.data()[i];
        double contrib;
        if (v == 0.0) {
          // subdifferential is [-lambda, lambda]: clamp -g into it
          contrib = std::max(std::fabs(g) - reg.lambda, 0.0);
        } else {
          contrib = std::fabs(g + reg.lambda * (v > 0.0 ? 1.0 : -1.0));
        }
        acc += contrib * contrib;
      }
      break;
  }
  return std::sqrt(acc);
}

std::string regularizer_describe(const Regularizer& reg) {
  switch (reg.kind) {
    case RegKind::none: return "none";
    case RegKind::squared_frobenius: return "squared_frobenius(" + format_g17(reg.lambda) + ")";
    case RegKind::ell1: return "ell1(" + format_g17(reg.lambda) + ")";
  }
  return "?";
}

void NetworkSpec::validate() const {
  if (depth < 1) throw ConfigError("dims", "network depth must be >= 1");
  if (dims.size() != static_cast<std::size_t>(depth) + 1) {
    throw ConfigError("dims", "expected depth+1 entries");
  }
  for (int d : dims) {
    if (d <= 0) throw ConfigError("dims", "layer widths must be positive");
  }
  if (activations.size() != static_cast<std::size_t>(depth)) {
    throw ConfigError("activations", "expected one activation per layer");
  }
  if (weight_reg.size() != static_cast<std::size_t>(depth)) {
    throw ConfigError("weight_reg", "expected one regularizer per layer");
  }
  if (state_reg.size() != static_cast<std::size_t>(depth)) {
    throw ConfigError("state_reg", "expected one regularizer per layer");
  }
  for (const auto& r : weight_reg) {
    if (r.lambda < 0.0) throw ConfigError("weight_reg", "lambda must be >= 0");
  }
  for (const auto& r : state_reg) {
    if (r.lambda < 0.0) throw ConfigError("state_reg", "lambda must be >= 0");
  }
}

NetworkSpec make_network_spec(const std::vector<int>& dims, ActivationKind hidden,
                              ActivationKind last, LossKind loss) {
  NetworkSpec spec;
  spec.depth = static_cast<int>(dims.size()) - 1;
  spec.dims = dims;
  spec.activations.assign(spec.depth, hidden);
  if (spec.depth > 0) spec.activations.back() = last;
  spec.loss = loss;
  spec.weight_reg.assign(spec.depth, Regularizer::none());
  spec.state_reg.assign(spec.depth, Regularizer::none());
  spec.validate();
  return spec;
}

void DataSet::validate_against(const NetworkSpec& spec) const {
  if (inputs.rows() != spec.dims.front()) {
    throw ConfigError("data", "input rows " + std::to_string(inputs.rows()) +
                                  " do not match d_0 = " + std::to_string(spec.dims.front()));
  }
  if (labels.rows() != spec.dims.back()) {
    throw ConfigError("data", "label rows " + std::to_string(labels.rows()) +
                                  " do not match d_N = " + std::to_string(spec.dims.back()));
  }
  if (inputs.cols() != labels.cols()) {
    throw ConfigError("data", "inputs and labels disagree on sample count");
  }
}

}  // namespace amkl
