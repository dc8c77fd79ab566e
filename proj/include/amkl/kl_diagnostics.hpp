#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "amkl/trace.hpp"

namespace amkl {

/// Parameters of the sharpness inequality (gap)^theta <= c * dist near a
/// limit value fstar. tau and the neighborhood are not observable from a
/// trace; tau is carried for completeness (empty = unbounded).
struct KLParams {
  double theta = 0.5;  // in [0, 1)
  double c = 1.0;      // > 0
  std::optional<double> tau;
  double fstar = 0.0;
};

/// Empirical j-step sufficient-decrease certificate:
///   c1 * dist_{k+j}^2 <= f_k - f_{k+j}  for all k >= k0_hat.
/// An empty c1_hat means every checkable index was vacuous (zero distance,
/// nonnegative decrease): the bound holds with any constant. Serializers must
/// encode that state explicitly, never as a floating-point infinity.
struct DecreaseCertificate {
  int j = 1;
  std::optional<double> c1_hat;
  std::int64_t k0_hat = 0;
  std::vector<std::int64_t> violations;  // every failing k below k0_hat
  bool holds_after_k0 = false;
};

/// Same shape for the stronger condition c2 * dist^{1/alpha} <= decrease.
struct A2Certificate {
  int j = 1;
  double alpha = 0.5;
  std::optional<double> c2_hat;
  std::int64_t k0_hat = 0;
  std::vector<std::int64_t> violations;
  bool holds_after_k0 = false;
};

enum class RateRegime { finite, r_linear, r_sublinear, undetermined };
const char* rate_regime_name(RateRegime regime);

/// Convergence-regime classification of a gap sequence. Regime-specific
/// fields are set only for the chosen regime.
struct RateReport {
  RateRegime regime = RateRegime::undetermined;
  std::optional<double> eta_hat;                 // r_linear: per-j-step ratio in (0,1)
  std::optional<double> C_hat;                   // envelope constant
  std::optional<double> sublinear_exponent_hat;  // r_sublinear: gap ~ C q^{-exponent}
  std::optional<double> theta_implied;           // from exponent = 1/(2 theta - 1)
  std::int64_t k1_hat = 0;                       // burn-in the fit starts from
  double fit_residual = 0.0;                     // max |log gap - prediction| over the tail
  std::optional<double> r1_hat;                  // max of gap_k^{1/k} over the tail
};

struct KeyInequalityReport {
  std::vector<std::int64_t> checked_k;
  std::vector<bool> holds;
  double worst_margin = 0.0;  // min over k of RHS - LHS (0 when nothing checked)
  bool all_hold = true;
};

struct KlExponentEstimate {
  bool determined = false;
  double theta_hat = 0.0;
  double slope = 0.0;  // log gap per log dist
  double fit_residual = 0.0;
  int points = 0;
};

struct EnvelopeCheck {
  bool holds = false;
  double c_min = 0.0;
  std::optional<double> eta_used;  // fitted ratio when theta <= 1/2
};

struct ChiReport {
  bool vacuous = false;  // every denominator was zero
  double chi_hat = 0.0;
  std::int64_t k0 = 0;                // first index from which ratios stay <= chi_hat
  std::vector<std::int64_t> skipped;  // ratio indices with zero denominator
};

/// Certifies the j-step decrease on a recorded trace. Ratios are formed at
/// every k with dist_{k+j} > 0; indices with zero distance and nonnegative
/// decrease are vacuously satisfied. k0_hat is the smallest index with no
/// violation at or after it; if even the last checkable index fails,
/// holds_after_k0 is false and every failure is listed. When 8 or more
/// ratios are available past k0_hat, a certificate is also refused if their
/// running infimum is still collapsing at the end of the trace (second-half
/// minimum below half the first-half minimum): a decaying ratio means no
/// constant bounds the condition asymptotically.
DecreaseCertificate check_A1(const std::vector<double>& f, const std::vector<double>& dist,
                             int j);
DecreaseCertificate check_A1(const IterTrace& trace, int j);

/// Same with denominator dist^{1/alpha}; alpha = 1/2 reproduces check_A1
/// field for field (the exponent is evaluated by repeated multiplication
/// when 1/alpha is a small integer).
A2Certificate check_A2(const std::vector<double>& f, const std::vector<double>& dist, int j,
                       double alpha);
A2Certificate check_A2(const IterTrace& trace, int j, double alpha);

/// Verifies (f_k - fstar)^{2 theta} <= (c^2 / c1) (f_{k-j} - f_k) at every k
/// with k - j >= cert.k0_hat and 0 < f_k - fstar < 1. A tiny relative slack
/// (1e-12) absorbs round-off at exact-equality points; worst_margin is the
/// raw minimum of RHS - LHS.
KeyInequalityReport check_key_inequality(const std::vector<double>& f, const KLParams& kl, int j,
                          const DecreaseCertificate& cert);

/// Classifies a nonnegative gap sequence:
///  - finite when the gaps reach exactly zero and stay there (at least 3
///    trailing zeros, so a min-subtracted solver trace does not qualify);
///  - otherwise fits log gap against k (geometric) and against
///    log(floor(k/j)+1) (polynomial) over the positive entries of the last
///    half and keeps the regime with the smaller max log-residual;
///  - undetermined when fewer than 16 positive tail gaps exist, when both
///    residuals exceed 0.5, or when neither fit is admissible.
RateReport fit_rate(const std::vector<double>& gaps, int j);

/// Least-squares slope of log gap vs log dist over the tail; theta_hat is the
/// inverse slope clamped to [0, 1).
KlExponentEstimate estimate_kl_exponent(const std::vector<double>& f,
                                        const std::vector<double>& dist, double fstar);
KlExponentEstimate estimate_kl_exponent(const IterTrace& trace, double fstar);

/// Smallest C with gap_k <= C * envelope(k) for k >= k1, where the envelope
/// is eta^{floor((k-k1)/j)} for theta <= 1/2 (eta fitted on the tail) and
/// (floor((k-k1)/j)+1)^{-1/(2 theta - 1)} for theta > 1/2. holds is false
/// when the required C is still growing in the second half of the range.
EnvelopeCheck verify_envelope(const std::vector<double>& gaps, int j, double theta,
                              std::int64_t k1);

/// Ratio bound chi_hat = max over the tail of diff_{i-1}/diff_i, skipping and
/// reporting zero denominators. Indices are positions in the diff sequence.
ChiReport check_chi_ratio(const std::vector<double>& diffs);

}  // namespace amkl
