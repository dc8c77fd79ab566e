#include "amkl/kl_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amkl {

const char* rate_regime_name(RateRegime regime) {
  switch (regime) {
    case RateRegime::finite: return "finite";
    case RateRegime::r_linear: return "r_linear";
    case RateRegime::r_sublinear: return "r_sublinear";
    case RateRegime::undetermined: return "undetermined";
  }
  return "?";
}

namespace {

// d^expo, by repeated multiplication when expo is a small integer so that the
// alpha = 1/2 certificate agrees bit for bit with the squared-distance one.
double dist_power(double d, double expo) {
  const long r = std::lround(expo);
  if (r >= 1 && r <= 4 && std::fabs(expo - static_cast<double>(r)) < 1e-12) {
    double p = d;
    for (long i = 1; i < r; ++i) p *= d;
    return p;
  }
  return std::pow(d, expo);
}

struct CertCore {
  std::optional<double> c_hat;
  std::int64_t k0_hat = 0;
  std::vector<std::int64_t> violations;
  bool holds = false;
};

CertCore certify(const std::vector<double>& f, const std::vector<double>& dist, int j,
                 double expo) {
  if (j < 1) throw std::invalid_argument("certify: j must be >= 1");
  if (f.size() != dist.size()) throw std::invalid_argument("certify: f/dist length mismatch");
  if (f.size() <= static_cast<std::size_t>(j)) {
    throw std::invalid_argument("certify: trace too short for j = " + std::to_string(j));
  }
  const std::int64_t last_k = static_cast<std::int64_t>(f.size()) - 1 - j;

  std::vector<std::int64_t> failures;
  std::vector<std::pair<std::int64_t, double>> ratios;
  for (std::int64_t k = 0; k <= last_k; ++k) {
    const double decrease = f[k] - f[k + j];
    const double denom = dist_power(dist[k + j], expo);
    if (denom > 0.0) {
      if (decrease > 0.0) {
        ratios.emplace_back(k, decrease / denom);
      } else {
        failures.push_back(k);  // no positive constant can satisfy the bound
      }
    } else if (decrease < 0.0) {
      failures.push_back(k);  // increase into an exact critical point
    }
    // denom == 0 with decrease >= 0: vacuously satisfied
  }

  CertCore core;
  core.violations = failures;
  if (failures.empty()) {
    core.k0_hat = 0;
    core.holds = true;
  } else if (failures.back() < last_k) {
    core.k0_hat = failures.back() + 1;
    core.holds = true;
  } else {
    core.k0_hat = last_k + 1;
    core.holds = false;
  }
  if (!core.holds) return core;

  std::vector<std::pair<std::int64_t, double>> active;
  for (const auto& [k, ratio] : ratios) {
    if (k >= core.k0_hat) active.emplace_back(k, ratio);
  }
  // A finite trace always has a positive infimum; refuse the certificate when
  // that infimum is still collapsing at the end (the second half of the
  // ratios dips below half the first half's minimum), since then no single
  // constant can bound the condition asymptotically.
  if (active.size() >= 8) {
    const std::int64_t mid_k = (core.k0_hat + last_k) / 2;
    double first_min = 0.0;
    double second_min = 0.0;
    bool have_first = false;
    bool have_second = false;
    for (const auto& [k, ratio] : active) {
      if (k <= mid_k) {
        first_min = have_first ? std::min(first_min, ratio) : ratio;
        have_first = true;
      } else {
        second_min = have_second ? std::min(second_min, ratio) : ratio;
        have_second = true;
      }
    }
    if (have_first && have_second && second_min < 0.5 * first_min) {
      core.holds = false;
      core.k0_hat = last_k + 1;
      for (const auto& [k, ratio] : active) {
        if (k > mid_k && ratio < 0.5 * first_min) core.violations.push_back(k);
      }
      return core;
    }
  }
  for (const auto& [k, ratio] : active) {
    if (!core.c_hat || ratio < *core.c_hat) core.c_hat = ratio;
  }
  return core;
}

}  // namespace

DecreaseCertificate check_A1(const std::vector<double>& f, const std::vector<double>& dist,
                             int j) {
  const CertCore core = certify(f, dist, j, 2.0);
  return DecreaseCertificate{j, core.c_hat, core.k0_hat, core.violations, core.holds};
}

DecreaseCertificate check_A1(const IterTrace& trace, int j) {
  return check_A1(trace.f_values(), trace.dist_values(), j);
}

A2Certificate check_A2(const std::vector<double>& f, const std::vector<double>& dist, int j,
                       double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("check_A2: alpha must be > 0");
  const CertCore core = certify(f, dist, j, 1.0 / alpha);
  return A2Certificate{j, alpha, core.c_hat, core.k0_hat, core.violations, core.holds};
}

A2Certificate check_A2(const IterTrace& trace, int j, double alpha) {
  return check_A2(trace.f_values(), trace.dist_values(), j, alpha);
}

KeyInequalityReport check_key_inequality(const std::vector<double>& f, const KLParams& kl, int j,
                          const DecreaseCertificate& cert) {
  if (!cert.c1_hat.has_value()) {
    throw std::invalid_argument("check_key_inequality: certificate must carry a finite c1");
  }
  if (!std::isfinite(kl.fstar)) throw std::invalid_argument("check_key_inequality: fstar is required");
  if (!(kl.theta >= 0.0 && kl.theta < 1.0) || !(kl.c > 0.0)) {
    throw std::invalid_argument("check_key_inequality: invalid KL parameters");
  }
  KeyInequalityReport report;
  const std::int64_t start = std::max<std::int64_t>(cert.k0_hat + j, j);
  for (std::int64_t k = start; k < static_cast<std::int64_t>(f.size()); ++k) {
    const double gap = f[k] - kl.fstar;
    if (!(gap > 0.0 && gap < 1.0)) continue;
    const double lhs = std::pow(gap, 2.0 * kl.theta);
    const double rhs = (kl.c * kl.c * (f[k - j] - f[k])) / *cert.c1_hat;
    const double margin = rhs - lhs;
    const bool ok = margin >= -1e-12 * std::max(std::fabs(lhs), std::fabs(rhs));
    report.checked_k.push_back(k);
    report.holds.push_back(ok);
    if (report.checked_k.size() == 1 || margin < report.worst_margin) {
      report.worst_margin = margin;
    }
    report.all_hold = report.all_hold && ok;
  }
  return report;
}

namespace {

struct LineFit {
  bool valid = false;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit fit;
  const std::size_t n = xs.size();
  if (n < 2) return fit;
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (!(sxx > 1e-30)) return fit;  // zero-variance regressor
  fit.valid = true;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (std::size_t i = 0; i < n; ++i) {
    fit.max_residual =
        std::max(fit.max_residual, std::fabs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  }
  return fit;
}

}  // namespace

RateReport fit_rate(const std::vector<double>& gaps, int j) {
  if (j < 1) throw std::invalid_argument("fit_rate: j must be >= 1");
  for (double g : gaps) {
    if (!(g >= 0.0)) throw std::invalid_argument("fit_rate: gaps must be nonnegative");
  }
  RateReport report;
  const std::int64_t n = static_cast<std::int64_t>(gaps.size());
  if (n == 0) return report;

  std::int64_t last_positive = -1;
  for (std::int64_t i = 0; i < n; ++i) {
    if (gaps[i] > 0.0) last_positive = i;
  }
  if (last_positive == -1) {
    report.regime = RateRegime::finite;
    report.k1_hat = 0;
    return report;
  }
  // A single trailing zero is what the min-over-trace limit proxy produces;
  // require a run of them before calling the sequence finitely convergent.
  if (n - 1 - last_positive >= 3) {
    report.regime = RateRegime::finite;
    report.k1_hat = last_positive + 1;
    return report;
  }

  const std::int64_t tail_start = n / 2;
  report.k1_hat = tail_start;
  std::vector<double> ks, logs, steps;
  double r1 = 0.0;
  bool have_r1 = false;
  for (std::int64_t k = tail_start; k < n; ++k) {
    if (!(gaps[k] > 0.0)) continue;
    ks.push_back(static_cast<double>(k));
    logs.push_back(std::log(gaps[k]));
    steps.push_back(std::log(static_cast<double>(k / j + 1)));
    if (k >= 1) {
      r1 = std::max(r1, std::pow(gaps[k], 1.0 / static_cast<double>(k)));
      have_r1 = true;
    }
  }
  if (have_r1) report.r1_hat = r1;
  if (ks.size() < 16) return report;  // undetermined

  const LineFit lin = fit_line(ks, logs);
  const LineFit sub = fit_line(steps, logs);
  const bool lin_ok = lin.valid && lin.slope < 0.0;
  const bool sub_ok = sub.valid && sub.slope < 0.0;
  if (!lin_ok && !sub_ok) return report;

  const bool pick_linear = lin_ok && (!sub_ok || lin.max_residual <= sub.max_residual);
  const LineFit& best = pick_linear ? lin : sub;
  report.fit_residual = best.max_residual;
  if (best.max_residual > 0.5) return report;  // undetermined

  if (pick_linear) {
    report.regime = RateRegime::r_linear;
    report.eta_hat = std::exp(static_cast<double>(j) * lin.slope);
    report.C_hat = std::exp(lin.intercept + lin.slope * static_cast<double>(tail_start));
  } else {
    report.regime = RateRegime::r_sublinear;
    report.sublinear_exponent_hat = -sub.slope;
    report.theta_implied = 0.5 * (1.0 / *report.sublinear_exponent_hat + 1.0);
    report.C_hat = std::exp(sub.intercept);
  }
  return report;
}

KlExponentEstimate estimate_kl_exponent(const std::vector<double>& f,
                                        const std::vector<double>& dist, double fstar) {
  if (f.size() != dist.size()) {
    throw std::invalid_argument("estimate_kl_exponent: f/dist length mismatch");
  }
  KlExponentEstimate est;
  const std::int64_t n = static_cast<std::int64_t>(f.size());
  std::vector<double> xs, ys;
  for (std::int64_t k = n / 2; k < n; ++k) {
    const double gap = f[k] - fstar;
    if (gap > 0.0 && dist[k] > 0.0) {
      xs.push_back(std::log(dist[k]));
      ys.push_back(std::log(gap));
    }
  }
  est.points = static_cast<int>(xs.size());
  if (xs.size() < 16) return est;
  const LineFit fit = fit_line(xs, ys);
  if (!fit.valid || std::fabs(fit.slope) < 1e-12) return est;
  est.determined = true;
  est.slope = fit.slope;
  est.theta_hat = std::clamp(1.0 / fit.slope, 0.0, 1.0 - 1e-12);
  est.fit_residual = fit.max_residual;
  return est;
}

KlExponentEstimate estimate_kl_exponent(const IterTrace& trace, double fstar) {
  return estimate_kl_exponent(trace.f_values(), trace.dist_values(), fstar);
}

EnvelopeCheck verify_envelope(const std::vector<double>& gaps, int j, double theta,
                              std::int64_t k1) {
  if (j < 1) throw std::invalid_argument("verify_envelope: j must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::invalid_argument("verify_envelope: theta must be in (0, 1)");
  }
  if (k1 < 0 || k1 >= static_cast<std::int64_t>(gaps.size())) {
    throw std::invalid_argument("verify_envelope: k1 out of range");
  }
  for (double g : gaps) {
    if (!(g >= 0.0)) throw std::invalid_argument("verify_envelope: gaps must be nonnegative");
  }
  const std::int64_t n = static_cast<std::int64_t>(gaps.size());
  EnvelopeCheck check;

  double log_eta = 0.0;
  if (theta <= 0.5) {
    // Geometric envelope: the ratio is fitted on the tail first.
    std::vector<double> ks, logs;
    for (std::int64_t k = n / 2; k < n; ++k) {
      if (gaps[k] > 0.0) {
        ks.push_back(static_cast<double>(k));
        logs.push_back(std::log(gaps[k]));
      }
    }
    const LineFit fit = fit_line(ks, logs);
    if (!fit.valid || !(fit.slope < 0.0)) {
      check.holds = false;
      return check;
    }
    log_eta = static_cast<double>(j) * fit.slope;
    check.eta_used = std::exp(log_eta);
  }

  // Everything in log space; log_c[k] is the C that gap_k alone requires.
  std::vector<std::pair<std::int64_t, double>> log_c;
  for (std::int64_t k = k1; k < n; ++k) {
    if (!(gaps[k] > 0.0)) continue;
    const double q = static_cast<double>((k - k1) / j);
    const double log_env =
        theta <= 0.5 ? q * log_eta : -(1.0 / (2.0 * theta - 1.0)) * std::log(q + 1.0);
    log_c.emplace_back(k, std::log(gaps[k]) - log_env);
  }
  if (log_c.empty()) {
    check.holds = true;
    check.c_min = 0.0;
    return check;
  }
  double overall = log_c.front().second;
  for (const auto& [k, lc] : log_c) overall = std::max(overall, lc);
  check.c_min = std::exp(overall);

  if (log_c.size() < 8) {
    check.holds = std::isfinite(check.c_min);
    return check;
  }
  const std::int64_t mid_k = k1 + (n - 1 - k1) / 2;
  double first = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (const auto& [k, lc] : log_c) {
    if (k <= mid_k) {
      first = std::max(first, lc);
    } else {
      second = std::max(second, lc);
    }
  }
  check.holds = second <= first + 1e-9;
  return check;
}

ChiReport check_chi_ratio(const std::vector<double>& diffs) {
  if (diffs.size() < 2) {
    throw std::invalid_argument("check_chi_ratio: need at least two consecutive diffs");
  }
  ChiReport report;
  const std::int64_t m = static_cast<std::int64_t>(diffs.size());
  std::vector<std::pair<std::int64_t, double>> ratios;
  for (std::int64_t i = 1; i < m; ++i) {
    if (diffs[i] == 0.0) {
      report.skipped.push_back(i);
    } else {
      ratios.emplace_back(i, diffs[i - 1] / diffs[i]);
    }
  }
  if (ratios.empty()) {
    report.vacuous = true;
    return report;
  }
  const std::int64_t tail_start = std::max<std::int64_t>(1, m / 2);
  bool have_tail = false;
  double chi = 0.0;
  for (const auto& [i, r] : ratios) {
    if (i >= tail_start) {
      chi = have_tail ? std::max(chi, r) : r;
      have_tail = true;
    }
  }
  if (!have_tail) {  // zeros swallowed the tail; bound what is measurable
    for (const auto& [i, r] : ratios) chi = std::max(chi, r);
  }
  report.chi_hat = chi;
  std::int64_t k0 = ratios.front().first;
  for (const auto& [i, r] : ratios) {
    if (r > chi) k0 = i + 1;
  }
  report.k0 = k0;
  return report;
}

}  // namespace amkl
