#pragma once

// Undamped multiple-degree-of-freedom structures: modal solution of the
// (K, M) pencil, modal superposition, and analytic-signal evaluation.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"

namespace modal_cs {

/// Lumped structure with diagonal mass and symmetric stiffness (no damping).
class MdofSystem {
 public:
  MdofSystem(RealMatrix mass, RealMatrix stiffness)
      : mass_(std::move(mass)), stiffness_(std::move(stiffness)) {
    const Index n = stiffness_.rows();
    require(n >= 1 && stiffness_.cols() == n && mass_.rows() == n &&
                mass_.cols() == n,
            ErrorKind::kShapeError, "mass and stiffness must both be N x N");
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i != j && mass_(i, j) != 0.0) {
          throw Error(ErrorKind::kNotSymmetric, "mass matrix must be diagonal");
        }
      }
      require(mass_(i, i) > 0.0 && std::isfinite(mass_(i, i)),
              ErrorKind::kNotSymmetric, "mass diagonal must be strictly positive");
    }
    require(stiffness_.allFinite(), ErrorKind::kInvalidArgument,
            "stiffness has non-finite entries");
    const double scale = std::max(max_abs(stiffness_), 1e-300);
    require(max_abs(stiffness_ - stiffness_.transpose()) <= 1e-12 * scale,
            ErrorKind::kNotSymmetric, "stiffness matrix is not symmetric");
  }

  /// Convenience for the common M = I case.
  static MdofSystem unit_mass(RealMatrix stiffness) {
    const Index n = stiffness.rows();
    return MdofSystem(RealMatrix::Identity(n, n), std::move(stiffness));
  }

  Index dof() const noexcept { return stiffness_.rows(); }
  const RealMatrix& mass() const noexcept { return mass_; }
  const RealMatrix& stiffness() const noexcept { return stiffness_; }

 private:
  RealMatrix mass_;
  RealMatrix stiffness_;
};

/// Mode shapes (columns, unit Euclidean norm), modal frequencies sorted
/// descending, and optional complex modal amplitudes A_n.
class ModalBasis {
 public:
  ModalBasis(RealMatrix mode_shapes, RealVector frequencies,
             ComplexVector amplitudes = ComplexVector())
      : shapes_(std::move(mode_shapes)),
        frequencies_(std::move(frequencies)),
        amplitudes_(std::move(amplitudes)) {
    const Index n = shapes_.rows();
    require(n >= 1 && shapes_.cols() == n, ErrorKind::kShapeError,
            "mode shape matrix must be N x N");
    require(frequencies_.size() == n, ErrorKind::kShapeError,
            "need one frequency per mode");
    require(amplitudes_.size() == 0 || amplitudes_.size() == n,
            ErrorKind::kShapeError, "need one amplitude per mode");
    for (Index i = 0; i < n; ++i) {
      require(std::isfinite(frequencies_(i)) && frequencies_(i) > 0.0,
              ErrorKind::kInvalidArgument, "modal frequencies must be positive");
      if (i > 0) {
        require(frequencies_(i - 1) >= frequencies_(i),
                ErrorKind::kInvalidArgument,
                "modal frequencies must be sorted descending");
      }
      require(std::abs(shapes_.col(i).norm() - 1.0) <= 1e-10,
              ErrorKind::kInvalidArgument, "mode shapes must have unit norm");
    }
    require(amplitudes_.allFinite(), ErrorKind::kInvalidArgument,
            "amplitudes must be finite");
  }

  Index size() const noexcept { return shapes_.cols(); }
  const RealMatrix& mode_shapes() const noexcept { return shapes_; }
  const RealVector& frequencies() const noexcept { return frequencies_; }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  bool has_amplitudes() const noexcept { return amplitudes_.size() == size(); }

  ModalBasis with_amplitudes(ComplexVector amplitudes) const {
    return ModalBasis(shapes_, frequencies_, std::move(amplitudes));
  }

  /// ||Psi^T Psi - I||_max. Zero (to rounding) for scalar mass matrices.
  double orthonormality_defect() const {
    return max_abs(shapes_.transpose() * shapes_ -
                   RealMatrix::Identity(size(), size()));
  }

  /// The diagonal scaling sqrt(M) * diag(A) of the factorisation V = Psi Gamma S.
  ComplexMatrix gamma(Index samples) const {
    require(has_amplitudes(), ErrorKind::kInvalidArgument, "amplitudes unset");
    return (std::sqrt(static_cast<double>(samples)) * amplitudes_)
        .asDiagonal()
        .toDenseMatrix();
  }

 private:
  RealMatrix shapes_;
  RealVector frequencies_;
  ComplexVector amplitudes_;
};

/// A basis built from modes given in arbitrary order. `order[j]` is the
/// input position of basis mode j.
struct OrderedBasis {
  ModalBasis basis;
  std::vector<Index> order;
};

/// Sorts (shape, frequency, amplitude) triples into descending-frequency
/// order, keeping the triples together.
inline OrderedBasis sort_modes(const RealMatrix& shapes, const RealVector& freqs,
                               const ComplexVector& amps) {
  require(shapes.cols() == freqs.size() &&
              (amps.size() == 0 || amps.size() == freqs.size()),
          ErrorKind::kShapeError, "mode count mismatch");
  std::vector<Index> order(static_cast<std::size_t>(freqs.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return freqs(a) > freqs(b); });
  RealMatrix s(shapes.rows(), shapes.cols());
  RealVector f(freqs.size());
  ComplexVector a(amps.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto jj = static_cast<Index>(j);
    s.col(jj) = shapes.col(order[j]);
    f(jj) = freqs(order[j]);
    if (amps.size() != 0) a(jj) = amps(order[j]);
  }
  return {ModalBasis(std::move(s), std::move(f), std::move(a)), std::move(order)};
}

/// Solves (K - w^2 M) psi = 0. Columns are unit-normalised with their
/// largest-magnitude entry positive; frequencies are returned descending.
///
/// For M = m*I the columns are orthonormal. For a general diagonal mass the
/// generalised eigenvectors are M-orthogonal only, and unit-normalising them
/// is the only rescaling that keeps the eigen-residual exact.
inline ModalBasis solve_modes(const MdofSystem& system) {
  const RealMatrix& k = system.stiffness();
  const RealMatrix& m = system.mass();
  const Index n = system.dof();

  Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> solver(
      k, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  require(solver.info() == Eigen::Success, ErrorKind::kNumericFailure,
          "generalized eigensolver did not converge");

  const RealVector& lambda = solver.eigenvalues();  // ascending
  const double k_norm = spectral_norm(k);
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * k_norm /
                       m.diagonal().minCoeff();
  for (Index i = 0; i < n; ++i) {
    if (!(lambda(i) > floor)) {
      throw Error(ErrorKind::kNonPositiveEigenvalue,
                  "generalized eigenvalue " + std::to_string(lambda(i)) +
                      " is not positive; system is unstable or degenerate");
    }
  }

  RealMatrix shapes(n, n);
  RealVector freqs(n);
  for (Index j = 0; j < n; ++j) {
    const Index src = n - 1 - j;
    freqs(j) = std::sqrt(lambda(src));
    RealVector v = solver.eigenvectors().col(src);
    v /= v.norm();
    if (v(argmax_abs(v)) < 0.0) v = -v;
    shapes.col(j) = v;
  }

  for (Index j = 1; j < n; ++j) {
    if (freqs(j - 1) - freqs(j) < 1e-9 * freqs(j - 1)) {
      throw Error(ErrorKind::kDegenerateSpectrum,
                  "repeated modal frequency; mode shapes are not unique");
    }
  }

  for (Index j = 0; j < n; ++j) {
    const double residual =
        ((k - freqs(j) * freqs(j) * m) * shapes.col(j)).norm();
    require(residual <= 1e-8 * k_norm, ErrorKind::kNumericFailure,
            "eigen-residual check failed");
  }
  return ModalBasis(std::move(shapes), std::move(freqs));
}

/// Natural frequency, damping ratio and the (rho, theta) form of a free
/// single-degree-of-freedom response x(t) = rho sin(w0 t + theta).
struct SdofParams {
  double natural_frequency = 0.0;
  double damping_ratio = 0.0;
  double rho = 0.0;
  double theta = 0.0;
};

/// rho and theta such that rho sin(w t + theta) = 2a cos(w t) - 2b sin(w t),
/// for A = a + ib. (0, 0) maps to rho = theta = 0.
inline std::pair<double, double> sdof_response_params(double a, double b) {
  const double r = std::hypot(a, b);
  if (r == 0.0) return {0.0, 0.0};
  const double base = std::asin(std::clamp(a / r, -1.0, 1.0));
  const double theta = b <= 0.0 ? base : std::numbers::pi - base;
  return {2.0 * r, theta};
}

/// Fills SdofParams from mass, damping and stiffness plus the complex
/// amplitude A of the e^{i w0 t} term.
inline SdofParams sdof_params(double mass, double damping, double stiffness,
                              Complex amplitude) {
  require(mass > 0.0 && stiffness > 0.0 && damping >= 0.0,
          ErrorKind::kInvalidArgument, "need m > 0, k > 0, C >= 0");
  SdofParams p;
  p.natural_frequency = std::sqrt(stiffness / mass);
  p.damping_ratio = damping / (2.0 * mass * p.natural_frequency);
  std::tie(p.rho, p.theta) =
      sdof_response_params(amplitude.real(), amplitude.imag());
  return p;
}

/// Characteristic roots s = -xi w0 +/- w0 sqrt(xi^2 - 1).
inline std::pair<Complex, Complex> sdof_roots(double natural_frequency,
                                              double damping_ratio) {
  const Complex root =
      std::sqrt(Complex(damping_ratio * damping_ratio - 1.0, 0.0));
  const Complex base(-damping_ratio * natural_frequency, 0.0);
  return {base + natural_frequency * root, base - natural_frequency * root};
}

/// Real displacement from modal superposition, sum_n psi_n rho_n sin(w_n t + theta_n).
inline RealVector evaluate_displacement(const ModalBasis& basis, double t) {
  require(basis.has_amplitudes(), ErrorKind::kInvalidArgument, "amplitudes unset");
  RealVector u = RealVector::Zero(basis.size());
  for (Index n = 0; n < basis.size(); ++n) {
    const Complex a = basis.amplitudes()(n);
    const auto [rho, theta] = sdof_response_params(a.real(), a.imag());
    u += basis.mode_shapes().col(n) *
         (rho * std::sin(basis.frequencies()(n) * t + theta));
  }
  return u;
}

/// Analytic displacement sum_n psi_n A_n e^{i w_n t}.
inline ComplexVector evaluate_analytic(const ModalBasis& basis, double t) {
  require(basis.has_amplitudes(), ErrorKind::kInvalidArgument, "amplitudes unset");
  ComplexVector coeffs(basis.size());
  for (Index n = 0; n < basis.size(); ++n) {
    coeffs(n) = basis.amplitudes()(n) *
                std::polar(1.0, basis.frequencies()(n) * t);
  }
  return basis.mode_shapes().cast<Complex>() * coeffs;
}

/// Analytic signal of a uniformly sampled real sequence: negative-frequency
/// bins zeroed, positive bins doubled, DC and Nyquist kept.
inline std::vector<Complex> analytic_from_real(std::span<const double> samples) {
  const std::size_t m = samples.size();
  require(m >= 2, ErrorKind::kInvalidArgument, "need at least two samples");
  std::vector<Complex> time(samples.begin(), samples.end());
  std::vector<Complex> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, time);
  const std::size_t half = m / 2;
  for (std::size_t k = 1; k < m; ++k) {
    if (k < (m + 1) / 2) {
      spectrum[k] *= 2.0;
    } else if (!(m % 2 == 0 && k == half)) {
      spectrum[k] = 0.0;
    }
  }
  std::vector<Complex> out;
  fft.inv(out, spectrum);
  return out;
}

}  // namespace modal_cs
