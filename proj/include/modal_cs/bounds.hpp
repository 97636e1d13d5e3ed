#pragma once

// Sampling prescriptions and error bounds for SVD-based mode-shape recovery
// under uniform, random and compressed sampling, together with the special
// functions and Gram-matrix quantities they are built from.
//
// Logarithms are natural throughout.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/sampling.hpp"

namespace modal_cs {

/// log(floor(N/2)) + 1.01, the harmonic-sum surrogate shared by the
/// uniform and random prescriptions.
inline double harmonic_log_term(Index n) {
  return std::log(static_cast<double>(n / 2)) + 1.01;
}

/// Periodic sinc (Dirichlet kernel) sin(M x / 2) / (M sin(x / 2)), with the
/// limit (-1)^{k(M-1)} at x = 2 pi k.
inline double psinc(double x, Index samples) {
  require(samples >= 1, ErrorKind::kInvalidArgument, "psinc needs M >= 1");
  const double two_pi = 2.0 * std::numbers::pi;
  const double k = std::nearbyint(x / two_pi);
  if (std::abs(x - k * two_pi) <= 8.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(1.0, std::abs(x))) {
    const auto kk = static_cast<long long>(k);
    const long long power = kk * static_cast<long long>(samples - 1);
    return (power % 2 == 0) ? 1.0 : -1.0;
  }
  const double m = static_cast<double>(samples);
  return std::sin(m * x / 2.0) / (m * std::sin(x / 2.0));
}

/// Unnormalised sinc, sin(x) / x.
inline double sinc(double x) {
  return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

/// Binary KL divergence D(a || b) with 0 log 0 = 0.
inline double kl_div(double a, double b) {
  require(a >= 0.0 && a <= 1.0, ErrorKind::kDomainError, "kl_div needs a in [0, 1]");
  require(b > 0.0 && b < 1.0, ErrorKind::kDomainError, "kl_div needs b in (0, 1)");
  double d = 0.0;
  if (a > 0.0) d += a * (std::log(a) - std::log(b));
  if (a < 1.0) d += (1.0 - a) * (std::log1p(-a) - std::log1p(-b));
  return std::max(d, 0.0);
}

namespace detail {
inline constexpr const char* kEulerGammaDigits =
    "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467";

template <typename Real>
Real euler_gamma() {
  if constexpr (std::is_floating_point_v<Real>) {
    return std::numbers::egamma_v<Real>;
  } else {
    return Real(kEulerGammaDigits);
  }
}
}  // namespace detail

/// H_N - log N - gamma and its two-sided bracket
///   1 / (2N + 1/(1-gamma) - 2)  <=  H_N - log N - gamma  <  1 / (2N + 1/3),
/// with equality on the left only at N = 1.
template <typename Real>
struct HarmonicBracket {
  Index n = 0;
  Real harmonic{};  ///< H_N by summation
  Real excess{};    ///< H_N - log N - gamma
  Real lower{};
  Real upper{};

  /// `slack` absorbs rounding in the N = 1 equality case.
  bool holds(Real slack = Real(0)) const {
    return lower <= excess + slack && excess < upper;
  }
};

/// Running harmonic sum, so brackets for many N cost one pass.
template <typename Real = double>
class HarmonicAccumulator {
 public:
  void extend_to(Index n) {
    for (; n_ < n; ++n_) sum_ += Real(1) / Real(n_ + 1);
  }

  HarmonicBracket<Real> bracket() const {
    using std::log;
    require(n_ >= 1, ErrorKind::kInvalidArgument, "need N >= 1");
    const Real gamma = detail::euler_gamma<Real>();
    const Real two_n = Real(2 * n_);
    HarmonicBracket<Real> b;
    b.n = n_;
    b.harmonic = sum_;
    b.excess = sum_ - log(Real(n_)) - gamma;
    b.lower = Real(1) / (two_n + Real(1) / (Real(1) - gamma) - Real(2));
    b.upper = Real(1) / (two_n + Real(1) / Real(3));
    return b;
  }

 private:
  Index n_ = 0;
  Real sum_ = Real(0);
};

/// Summing in double resolves the strict upper inequality only up to a few
/// thousand; instantiate with a wider Real for large N.
template <typename Real = double>
HarmonicBracket<Real> harmonic_number_bounds(Index n) {
  require(n >= 1, ErrorKind::kInvalidArgument, "need N >= 1");
  // Smallest terms first.
  Real sum(0);
  for (Index k = n; k >= 1; --k) sum += Real(1) / Real(k);
  HarmonicAccumulator<Real> acc;
  acc.extend_to(n);
  auto b = acc.bracket();
  using std::log;
  b.harmonic = sum;
  b.excess = sum - log(Real(n)) - detail::euler_gamma<Real>();
  return b;
}

enum class BoundVariant { kUniform, kRandom, kCompressed };

struct SamplingPlan {
  Scheme scheme = Scheme::kUniform;
  Index dof = 0;
  double epsilon = 0.0;
  std::optional<double> sampling_interval;  ///< T_s, uniform only
  double t_max_min = 0.0;
  Index samples_min = 0;
  std::optional<double> tau;                ///< failure probability, random only
  std::optional<double> divergence;         ///< min(D1, D2), random only
};

/// Uniform sampling: T_s = pi / delta_max,
/// t_max >= 2 pi (log floor(N/2) + 1.01) / (eps delta_min),
/// M >= max(2 (log floor(N/2) + 1.01) / eps * delta_max / delta_min + 1, N).
inline SamplingPlan uniform_requirements(Index dof, double delta_min,
                                         double delta_max, double epsilon) {
  require(dof >= 2, ErrorKind::kDomainError, "need N >= 2");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::kDomainError,
          "need 0 < epsilon < 1");
  require(delta_min > 0.0 && delta_min <= delta_max && std::isfinite(delta_max),
          ErrorKind::kDomainError, "need 0 < delta_min <= delta_max");
  const double lt = harmonic_log_term(dof);
  SamplingPlan plan;
  plan.scheme = Scheme::kUniform;
  plan.dof = dof;
  plan.epsilon = epsilon;
  plan.sampling_interval = std::numbers::pi / delta_max;
  plan.t_max_min = 2.0 * std::numbers::pi * lt / (epsilon * delta_min);
  const double m = 2.0 * lt / epsilon * (delta_max / delta_min) + 1.0;
  plan.samples_min = std::max(static_cast<Index>(std::ceil(m)), dof);
  return plan;
}

/// Random sampling: t_max >= 40 (log floor(N/2) + 1.01) / (eps delta_min) and
/// M > max((log N + log(2/tau)) / min(D1, D2), N) with
/// D1 = D((1+eps)/N || (1+eps/10)/N), D2 = D((1-eps)/N || (1-eps/10)/N).
inline SamplingPlan random_requirements(Index dof, double delta_min,
                                        double epsilon, double tau) {
  require(dof >= 2, ErrorKind::kDomainError, "need N >= 2");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::kDomainError,
          "need 0 < epsilon < 1");
  require(tau > 0.0 && tau < 1.0, ErrorKind::kDomainError, "need 0 < tau < 1");
  require(delta_min > 0.0 && std::isfinite(delta_min), ErrorKind::kDomainError,
          "need delta_min > 0");
  const double n = static_cast<double>(dof);
  require((1.0 + epsilon) / n <= 1.0, ErrorKind::kDomainError,
          "(1 + epsilon) / N must not exceed 1");
  const double d1 = kl_div((1.0 + epsilon) / n, (1.0 + epsilon / 10.0) / n);
  const double d2 = kl_div((1.0 - epsilon) / n, (1.0 - epsilon / 10.0) / n);
  const double dmin = std::min(d1, d2);
  const double count = (std::log(n) + std::log(2.0 / tau)) / dmin;

  SamplingPlan plan;
  plan.scheme = Scheme::kRandom;
  plan.dof = dof;
  plan.epsilon = epsilon;
  plan.tau = tau;
  plan.divergence = dmin;
  plan.t_max_min = 40.0 * harmonic_log_term(dof) / (epsilon * delta_min);
  // Strict inequality: smallest integer above max(count, N).
  plan.samples_min = static_cast<Index>(std::floor(std::max(count, n))) + 1;
  return plan;
}

/// Subgaussian JL rate f(eps) = eps^2 / 4 - eps^3 / 6.
inline double jl_rate(double epsilon) {
  return epsilon * epsilon / 4.0 - epsilon * epsilon * epsilon / 6.0;
}

/// M' >= (2k log(42/eps') + log(4/delta)) / f(eps' / sqrt 2).
inline Index jl_requirements(Index rank, double epsilon, double failure_prob) {
  require(rank >= 1, ErrorKind::kDomainError, "need rank k >= 1");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::kDomainError,
          "need 0 < epsilon' < 1");
  require(failure_prob > 0.0 && failure_prob < 1.0, ErrorKind::kDomainError,
          "need 0 < delta < 1");
  const double numer = 2.0 * static_cast<double>(rank) * std::log(42.0 / epsilon) +
                       std::log(4.0 / failure_prob);
  return static_cast<Index>(std::ceil(numer / jl_rate(epsilon / std::numbers::sqrt2)));
}

/// sep_n(eps) = max_{l != n} sqrt2 |A_l||A_n| / min_{c in [-1,1]} | |A_l|^2 - |A_n|^2 (1 + c eps) |.
/// The inner expression is affine in c, so the minimum is zero when the
/// interval [|A_l|^2 - |A_n|^2 (1+eps), |A_l|^2 - |A_n|^2 (1-eps)] contains 0
/// and otherwise sits at the endpoint nearer zero. Returns +inf when some
/// denominator vanishes or |A_n| = 0.
inline double separation_factor(std::span<const double> magnitudes, double epsilon,
                                Index n) {
  const auto size = static_cast<Index>(magnitudes.size());
  require(n >= 0 && n < size, ErrorKind::kInvalidArgument, "mode index out of range");
  for (double m : magnitudes) {
    require(m >= 0.0 && std::isfinite(m), ErrorKind::kDomainError,
            "magnitudes must be finite and non-negative");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double an = magnitudes[static_cast<std::size_t>(n)];
  if (an == 0.0) return inf;
  double sep = 0.0;
  for (Index l = 0; l < size; ++l) {
    if (l == n) continue;
    const double al = magnitudes[static_cast<std::size_t>(l)];
    const double lo = al * al - an * an * (1.0 + epsilon);
    const double hi = al * al - an * an * (1.0 - epsilon);
    if (lo <= 0.0 && hi >= 0.0) return inf;
    const double denom = std::min(std::abs(lo), std::abs(hi));
    sep = std::max(sep, std::numbers::sqrt2 * al * an / denom);
  }
  return sep;
}

/// eps sqrt(1+eps) / sqrt(1-eps).
inline double bound_prefactor(double epsilon) {
  return epsilon * std::sqrt(1.0 + epsilon) / std::sqrt(1.0 - epsilon);
}

/// min{sqrt2, eps sqrt(1+eps)/sqrt(1-eps) sep_n(eps)}. For the uniform and
/// random variants pass |A_n|; for the compressed term pass the singular
/// values of V.
inline double mode_error_bound(std::span<const double> magnitudes, double epsilon,
                               Index n, BoundVariant /*variant*/ = BoundVariant::kUniform) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::kDomainError,
          "need 0 < epsilon < 1");
  const double sep = separation_factor(magnitudes, epsilon, n);
  if (!std::isfinite(sep)) return std::numbers::sqrt2;
  return std::min(std::numbers::sqrt2, bound_prefactor(epsilon) * sep);
}

/// Two-term bound for uniform sampling followed by JL compression.
inline double compressed_mode_error_bound(std::span<const double> magnitudes,
                                          double epsilon,
                                          std::span<const double> singular_values,
                                          double epsilon_jl, Index n) {
  require(epsilon > 0.0 && epsilon < 1.0 && epsilon_jl > 0.0 && epsilon_jl < 1.0,
          ErrorKind::kDomainError, "need epsilon, epsilon' in (0, 1)");
  const double s1 = separation_factor(magnitudes, epsilon, n);
  const double s2 = separation_factor(singular_values, epsilon_jl, n);
  if (!std::isfinite(s1) || !std::isfinite(s2)) return std::numbers::sqrt2;
  return std::min(std::numbers::sqrt2,
                  bound_prefactor(epsilon) * s1 + bound_prefactor(epsilon_jl) * s2);
}

/// Eigenvalues of S S^*, ascending.
inline RealVector gram_eigenvalues(const SteeringMatrix& s) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(s.gram(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

/// ||S S^* - I||_2, the relative perturbation size eta.
inline double gram_deviation(const SteeringMatrix& s) {
  const Index n = s.modes();
  return hermitian_spectral_norm(s.gram() - ComplexMatrix::Identity(n, n));
}

struct GershgorinBound {
  double radius = 0.0;
  /// T_s <= pi / max|w_l - w_n|, where the linear lower bound on the
  /// kernel's denominator applies.
  bool in_validity_region = true;
};

/// max_l sum_{n != l} |psinc(|w_l - w_n| T_s)| for the M-sample kernel.
inline GershgorinBound gershgorin_uniform_bound(const RealVector& frequencies,
                                                double sampling_interval,
                                                Index samples) {
  require(sampling_interval > 0.0 && samples >= 1, ErrorKind::kInvalidArgument,
          "need T_s > 0 and M >= 1");
  GershgorinBound out;
  double spread = 0.0;
  for (Index l = 0; l < frequencies.size(); ++l) {
    double row = 0.0;
    for (Index n = 0; n < frequencies.size(); ++n) {
      if (n == l) continue;
      const double gap = std::abs(frequencies(l) - frequencies(n));
      spread = std::max(spread, gap);
      row += std::abs(psinc(gap * sampling_interval, samples));
    }
    out.radius = std::max(out.radius, row);
  }
  out.in_validity_region = spread == 0.0 || sampling_interval <= std::numbers::pi / spread;
  return out;
}

/// E[S S^*] for times uniform on [0, t_max]: off-diagonal
/// e^{i (w_l - w_n) t_max / 2} sinc((w_l - w_n) t_max / 2).
inline ComplexMatrix expected_gram_matrix(const RealVector& frequencies, double t_max) {
  require(t_max > 0.0, ErrorKind::kInvalidArgument, "need t_max > 0");
  const Index n = frequencies.size();
  ComplexMatrix g = ComplexMatrix::Identity(n, n);
  for (Index l = 0; l < n; ++l) {
    for (Index k = 0; k < n; ++k) {
      if (l == k) continue;
      const double half = (frequencies(l) - frequencies(k)) * t_max / 2.0;
      g(l, k) = std::polar(sinc(half), half);
    }
  }
  return g;
}

struct ExpectedGramBound {
  double radius = 0.0;       ///< Gershgorin radius of E[S S^*] - I
  double closed_form = 0.0;  ///< 4 (log floor(N/2) + 1.01) / (delta_min t_max)
  double delta_min = 0.0;    ///< smallest frequency gap
  bool dominated = false;    ///< radius <= closed_form
};

inline ExpectedGramBound expected_gram_random(const RealVector& frequencies,
                                              double t_max) {
  const Index n = frequencies.size();
  require(n >= 2, ErrorKind::kInvalidArgument, "need at least two modes");
  require(t_max > 0.0, ErrorKind::kInvalidArgument, "need t_max > 0");
  ExpectedGramBound out;
  out.delta_min = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < n; ++l) {
    double row = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k == l) continue;
      const double gap = frequencies(l) - frequencies(k);
      out.delta_min = std::min(out.delta_min, std::abs(gap));
      row += std::abs(sinc(gap * t_max / 2.0));
    }
    out.radius = std::max(out.radius, row);
  }
  out.closed_form = out.delta_min > 0.0
                        ? 4.0 * harmonic_log_term(n) / (out.delta_min * t_max)
                        : std::numeric_limits<double>::infinity();
  out.dominated = out.radius <= out.closed_form;
  return out;
}

/// Evaluated prescriptions and per-mode bounds for one sampled configuration.
struct BoundReport {
  BoundVariant variant = BoundVariant::kUniform;
  double epsilon = 0.0;
  std::vector<double> separation;
  std::vector<double> error_bounds;
  double gram_deviation = 0.0;
  /// Gershgorin radius; uniform schedules only.
  std::optional<double> gershgorin;
};

/// Bounds evaluated at eps = the measured Gram deviation (when it is < 1).
/// Outside that range every per-mode bound is the sqrt2 ceiling.
inline BoundReport evaluate_bounds(std::span<const double> magnitudes,
                                   const RealVector& frequencies,
                                   const SampleSchedule& schedule,
                                   BoundVariant variant) {
  const auto steering = build_steering(frequencies, schedule);
  BoundReport r;
  r.variant = variant;
  r.gram_deviation = gram_deviation(steering);
  r.epsilon = r.gram_deviation;
  const auto n = static_cast<Index>(magnitudes.size());
  for (Index i = 0; i < n; ++i) {
    const bool usable = r.epsilon > 0.0 && r.epsilon < 1.0;
    r.separation.push_back(usable ? separation_factor(magnitudes, r.epsilon, i)
                                  : std::numeric_limits<double>::infinity());
    r.error_bounds.push_back(usable ? mode_error_bound(magnitudes, r.epsilon, i, variant)
                                    : (r.epsilon == 0.0 ? 0.0 : std::numbers::sqrt2));
  }
  if (schedule.is_uniform()) {
    r.gershgorin = gershgorin_uniform_bound(frequencies, schedule.sampling_interval(),
                                            schedule.size())
                       .radius;
  }
  return r;
}

}  // namespace modal_cs
