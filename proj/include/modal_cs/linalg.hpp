#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace modal_cs {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(a.eval());
  return svd.singularValues()(0);
}

/// Spectral norm of a Hermitian matrix: largest |eigenvalue|.
inline double hermitian_spectral_norm(const ComplexMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Index of the largest-magnitude entry; the first one wins ties.
template <typename Derived>
Index argmax_abs(const Eigen::MatrixBase<Derived>& v) {
  Index best = 0;
  double best_mag = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

/// Rotates `v` so its largest-magnitude entry is real and positive and
/// returns the unit-modulus factor that was applied.
inline Complex canonicalize_phase(Eigen::Ref<ComplexVector> v) {
  if (v.size() == 0) return Complex(1.0, 0.0);
  const Complex pivot = v(argmax_abs(v));
  const double mag = std::abs(pivot);
  if (mag == 0.0) return Complex(1.0, 0.0);
  const Complex phase = std::conj(pivot) / mag;
  v *= phase;
  return phase;
}

inline std::vector<double> to_std(const RealVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline RealVector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const RealVector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace modal_cs
