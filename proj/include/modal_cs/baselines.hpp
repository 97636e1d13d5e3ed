#pragma once

// Reference methods: Welch cross-spectral density, frequency domain
// decomposition (FDD), and l1 sparse reconstruction in a DFT basis.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/sampling.hpp"

namespace modal_cs {

/// One N x N cross-spectral matrix per frequency bin.
struct CsdCube {
  RealVector frequencies;              ///< rad/s
  std::vector<ComplexMatrix> matrices;

  Index bins() const noexcept { return frequencies.size(); }
  Index channels() const noexcept { return matrices.empty() ? 0 : matrices.front().rows(); }
};

enum class Window { kHann, kRectangular };

struct WelchOptions {
  Index segment_len = 0;       ///< 0 = smallest power of two >= M / 8
  double overlap = 0.5;        ///< fraction of segment_len shared by neighbours
  Window window = Window::kHann;
};

inline Index default_segment_len(Index samples) {
  Index len = 1;
  while (len * 8 < samples) len *= 2;
  return std::min(len, samples);
}

inline std::vector<double> make_window(Window kind, Index len) {
  std::vector<double> w(static_cast<std::size_t>(len), 1.0);
  if (kind == Window::kHann) {
    // periodic Hann
    for (Index i = 0; i < len; ++i) {
      w[static_cast<std::size_t>(i)] =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(len));
    }
  }
  return w;
}

/// Averaged modified periodograms on the one-sided grid of the segment FFT,
/// scaled as a one-sided density (interior bins doubled). Rows of `u` are
/// channels, columns are uniform samples at interval T_s.
inline CsdCube welch_csd(const RealMatrix& u, const WelchOptions& options,
                         double sampling_interval) {
  const Index n = u.rows();
  const Index m = u.cols();
  require(n >= 1 && m >= 1, ErrorKind::kShapeError, "empty sensor matrix");
  require(sampling_interval > 0.0, ErrorKind::kInvalidArgument, "need T_s > 0");
  const Index seg = options.segment_len > 0 ? options.segment_len : default_segment_len(m);
  require(seg <= m, ErrorKind::kShapeError,
          "segment length " + std::to_string(seg) + " exceeds sample count " +
              std::to_string(m));
  require(seg >= 2, ErrorKind::kShapeError, "segment length must be at least 2");
  require(options.overlap >= 0.0 && options.overlap < 1.0, ErrorKind::kInvalidArgument,
          "overlap must be in [0, 1)");
  const Index hop = std::max<Index>(1, seg - static_cast<Index>(std::floor(options.overlap *
                                                                           static_cast<double>(seg))));
  const auto w = make_window(options.window, seg);
  const double wsq = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  const Index bins = seg / 2 + 1;

  CsdCube cube;
  cube.frequencies.resize(bins);
  for (Index k = 0; k < bins; ++k) {
    cube.frequencies(k) = 2.0 * std::numbers::pi * static_cast<double>(k) /
                          (static_cast<double>(seg) * sampling_interval);
  }
  cube.matrices.assign(static_cast<std::size_t>(bins), ComplexMatrix::Zero(n, n));

  Eigen::FFT<double> fft;
  std::vector<Complex> buf(static_cast<std::size_t>(seg));
  std::vector<Complex> spec;
  ComplexMatrix x(n, bins);
  Index segments = 0;
  for (Index start = 0; start + seg <= m; start += hop) {
    for (Index r = 0; r < n; ++r) {
      for (Index j = 0; j < seg; ++j) {
        buf[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] * u(r, start + j);
      }
      fft.fwd(spec, buf);
      for (Index k = 0; k < bins; ++k) x(r, k) = spec[static_cast<std::size_t>(k)];
    }
    for (Index k = 0; k < bins; ++k) {
      cube.matrices[static_cast<std::size_t>(k)].noalias() += x.col(k) * x.col(k).adjoint();
    }
    ++segments;
  }

  const double base = sampling_interval / (wsq * static_cast<double>(segments));
  for (Index k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (seg % 2 == 0 && k == bins - 1);
    auto& c = cube.matrices[static_cast<std::size_t>(k)];
    c *= edge ? base : 2.0 * base;
    c = (0.5 * (c + c.adjoint())).eval();
  }
  return cube;
}

struct FddResult {
  RealVector frequencies;       ///< rad/s, by descending peak height
  ComplexMatrix mode_shapes;    ///< N x n_modes, unit norm, canonical phase
  RealVector peak_values;       ///< first singular value at each peak
  std::vector<Index> peak_bins;
  RealVector first_singular;    ///< first singular value at every bin
};

/// Largest eigenvalue of each CSD matrix.
inline RealVector csd_first_singular(const CsdCube& csd) {
  RealVector s(csd.bins());
  for (Index k = 0; k < csd.bins(); ++k) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(csd.matrices[static_cast<std::size_t>(k)],
                                                     Eigen::EigenvaluesOnly);
    s(k) = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  }
  return s;
}

/// Picks the n_modes highest interior local maxima of the first singular
/// value of the CSD and returns the matching first singular vectors.
inline FddResult fdd_peaks(const CsdCube& csd, Index n_modes) {
  const Index bins = csd.bins();
  const Index n = csd.channels();
  require(n_modes >= 1 && n_modes <= n, ErrorKind::kInvalidArgument,
          "need 1 <= n_modes <= channel count");
  FddResult out;
  out.first_singular.resize(bins);
  std::vector<ComplexVector> vecs(static_cast<std::size_t>(bins));
  for (Index k = 0; k < bins; ++k) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(csd.matrices[static_cast<std::size_t>(k)]);
    out.first_singular(k) = std::max(eig.eigenvalues()(n - 1), 0.0);
    vecs[static_cast<std::size_t>(k)] = eig.eigenvectors().col(n - 1);
  }

  std::vector<Index> maxima;
  const auto& s = out.first_singular;
  for (Index k = 1; k + 1 < bins; ++k) {
    if (s(k) > s(k - 1) && s(k) >= s(k + 1)) maxima.push_back(k);
  }
  require(static_cast<Index>(maxima.size()) >= n_modes, ErrorKind::kInsufficientPeaks,
          "found " + std::to_string(maxima.size()) + " spectral peaks, need " +
              std::to_string(n_modes));
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](Index a, Index b) { return s(a) > s(b); });
  maxima.resize(static_cast<std::size_t>(n_modes));

  out.frequencies.resize(n_modes);
  out.peak_values.resize(n_modes);
  out.mode_shapes.resize(n, n_modes);
  for (Index j = 0; j < n_modes; ++j) {
    const Index k = maxima[static_cast<std::size_t>(j)];
    ComplexVector v = vecs[static_cast<std::size_t>(k)];
    v.normalize();
    canonicalize_phase(v);
    out.mode_shapes.col(j) = v;
    out.frequencies(j) = csd.frequencies(k);
    out.peak_values(j) = s(k);
    out.peak_bins.push_back(k);
  }
  return out;
}

struct SparseOptions {
  Index max_iter = 5000;
  double tol = 1e-6;       ///< relative residual target
  double shrink = 0.5;     ///< threshold reduction per continuation stage
  double stage_tol = 1e-7; ///< relative iterate change ending a stage
  Index stage_iter = 100;  ///< iteration cap per stage
};

struct SparseResult {
  ComplexVector alpha;   ///< DFT coefficients
  ComplexVector signal;  ///< W alpha
  bool converged = false;
  double relative_residual = 0.0;
  Index iterations = 0;
  /// Per iteration: threshold and 0.5 ||A a - y||^2 + lambda ||a||_1 after the step.
  std::vector<double> thresholds;
  std::vector<double> objective;
};

namespace detail {

/// W a with W the unitary inverse DFT, W(m, k) = e^{2 pi i m k / M} / sqrt(M).
inline ComplexVector unitary_idft(Eigen::FFT<double>& fft, const ComplexVector& a) {
  const auto m = static_cast<std::size_t>(a.size());
  std::vector<Complex> in(a.data(), a.data() + m);
  std::vector<Complex> out;
  fft.inv(out, in);  // scaled by 1/M
  ComplexVector r(static_cast<Index>(m));
  const double s = std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) r(static_cast<Index>(i)) = out[i] * s;
  return r;
}

/// W^H x.
inline ComplexVector unitary_dft(Eigen::FFT<double>& fft, const ComplexVector& x) {
  const auto m = static_cast<std::size_t>(x.size());
  std::vector<Complex> in(x.data(), x.data() + m);
  std::vector<Complex> out;
  fft.fwd(out, in);
  ComplexVector r(static_cast<Index>(m));
  const double s = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) r(static_cast<Index>(i)) = out[i] * s;
  return r;
}

inline double l1(const ComplexVector& a) { return a.cwiseAbs().sum(); }

}  // namespace detail

/// Solves min ||a||_1 s.t. Phi^T W a = y approximately: iterative
/// shrinkage-thresholding on the penalized form with a decreasing threshold,
/// and after each stage a least-squares refit on the current support. Stops
/// once a refit meets the residual target. On failure the best iterate is
/// returned with converged = false.
inline SparseResult sparse_reconstruct(const ComplexVector& y, const JlMatrix& phi,
                                       const SparseOptions& options = {}) {
  const Index m = phi.rows();
  const Index mc = phi.cols();
  require(y.size() == mc, ErrorKind::kDimensionMismatch,
          "measurement length does not match Phi columns");
  require(mc <= m, ErrorKind::kInvalidArgument, "need M' <= M");
  require(options.max_iter >= 1 && options.tol > 0.0 && options.shrink > 0.0 &&
              options.shrink < 1.0 && options.stage_iter >= 1,
          ErrorKind::kInvalidArgument, "bad solver options");

  const RealMatrix& p = phi.entries();
  Eigen::FFT<double> fft;
  SparseResult res;
  res.alpha = ComplexVector::Zero(m);
  const double ynorm = y.norm();
  if (ynorm == 0.0) {
    res.signal = ComplexVector::Zero(m);
    res.converged = true;
    return res;
  }

  // Phi is real, so apply it to real and imaginary parts separately.
  auto real_apply = [](const auto& mat, const ComplexVector& v) {
    ComplexVector out(mat.rows());
    out.real() = mat * v.real();
    out.imag() = mat * v.imag();
    return out;
  };
  auto forward = [&](const ComplexVector& a) -> ComplexVector {
    return real_apply(p.transpose(), detail::unitary_idft(fft, a));
  };
  auto adjoint = [&](const ComplexVector& r) -> ComplexVector {
    return detail::unitary_dft(fft, real_apply(p, r));
  };

  const double lip = std::pow(spectral_norm(p), 2);
  const double step = 1.0 / lip;
  const double lambda_start = 0.9 * adjoint(y).cwiseAbs().maxCoeff();
  const double lambda_floor = lambda_start * 1e-9;

  // Columns of Phi^T W on a support, for the refit.
  auto support_matrix = [&](const std::vector<Index>& support) {
    ComplexMatrix a(mc, static_cast<Index>(support.size()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    ComplexVector col(m);
    for (std::size_t j = 0; j < support.size(); ++j) {
      const Index k = support[j];
      for (Index t = 0; t < m; ++t) {
        const double ang = 2.0 * std::numbers::pi *
                           static_cast<double>((k * t) % m) / static_cast<double>(m);
        col(t) = std::polar(scale, ang);
      }
      a.col(static_cast<Index>(j)) = real_apply(p.transpose(), col);
    }
    return a;
  };

  ComplexVector best = res.alpha;
  double best_resid = 1.0;
  ComplexVector a = res.alpha;
  double lambda = lambda_start;
  Index it = 0;
  while (it < options.max_iter) {
    // One continuation stage at fixed threshold.
    const Index stage_end = std::min(options.max_iter, it + options.stage_iter);
    for (; it < stage_end; ++it) {
      const ComplexVector grad = adjoint(forward(a) - y);
      ComplexVector next = a - step * grad;
      const double thr = lambda * step;
      for (Index k = 0; k < m; ++k) {
        const double mag = std::abs(next(k));
        next(k) = mag > thr ? next(k) * ((mag - thr) / mag) : Complex(0.0, 0.0);
      }
      const double change = (next - a).norm();
      a = std::move(next);
      const ComplexVector r = forward(a) - y;
      res.thresholds.push_back(lambda);
      res.objective.push_back(0.5 * r.squaredNorm() + lambda * detail::l1(a));
      const double rel = r.norm() / ynorm;
      if (rel < best_resid) {
        best_resid = rel;
        best = a;
      }
      if (change <= options.stage_tol * std::max(a.norm(), 1e-300)) {
        ++it;
        break;
      }
    }

    std::vector<Index> support;
    for (Index k = 0; k < m; ++k) {
      if (a(k) != Complex(0.0, 0.0)) support.push_back(k);
    }
    if (!support.empty() && static_cast<Index>(support.size()) <= mc) {
      const ComplexMatrix as = support_matrix(support);
      const ComplexVector coef = as.colPivHouseholderQr().solve(y);
      ComplexVector refit = ComplexVector::Zero(m);
      for (std::size_t j = 0; j < support.size(); ++j) refit(support[j]) = coef(static_cast<Index>(j));
      const double rel = (as * coef - y).norm() / ynorm;
      if (rel < best_resid) {
        best_resid = rel;
        best = refit;
      }
      if (rel <= options.tol) {
        res.converged = true;
        break;
      }
    }
    if (lambda <= lambda_floor) break;
    lambda = std::max(lambda * options.shrink, lambda_floor);
  }

  res.alpha = best;
  res.signal = detail::unitary_idft(fft, best);
  res.relative_residual = best_resid;
  res.iterations = it;
  res.converged = res.converged || best_resid <= options.tol;
  return res;
}

}  // namespace modal_cs
