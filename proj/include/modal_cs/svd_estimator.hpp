#pragma once

// Mode-shape estimation by truncated SVD of the data matrix, error metrics
// against a known basis, and modal-frequency estimation from the right
// singular vectors.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/mdof.hpp"
#include "modal_cs/sampling.hpp"

namespace modal_cs {

/// Rank-N truncated SVD  data = mode_shapes * diag(singular_values) * right_factors.
struct ModeEstimate {
  ComplexMatrix mode_shapes;    ///< N x N, columns are left singular vectors
  RealVector singular_values;   ///< length N, descending
  ComplexMatrix right_factors;  ///< N x cols, rows are conjugated right singular vectors
  DataKind source_kind = DataKind::kRaw;
  Scheme source_scheme = Scheme::kUniform;
  double source_interval = 0.0;

  Index size() const noexcept { return mode_shapes.cols(); }

  /// Modes whose singular value is numerically zero carry no information.
  std::vector<bool> reliable(double relative_tol = 1e-10) const {
    std::vector<bool> out(static_cast<std::size_t>(size()), false);
    const double top = singular_values.size() ? singular_values(0) : 0.0;
    for (Index i = 0; i < size(); ++i) {
      out[static_cast<std::size_t>(i)] =
          top > 0.0 && singular_values(i) > relative_tol * top;
    }
    return out;
  }

  ComplexMatrix reconstruct() const {
    return mode_shapes * singular_values.cast<Complex>().asDiagonal() * right_factors;
  }
};

/// Truncated SVD of an N x M data block with M >= N. Each left singular
/// vector is rotated so its largest entry is real positive, and the matching
/// row of right_factors takes the conjugate rotation.
inline ModeEstimate estimate_modes(const DataMatrix& data) {
  const Index n = data.rows();
  const Index cols = data.cols();
  require(n >= 1, ErrorKind::kShapeError, "data matrix has no rows");
  require(n <= cols, ErrorKind::kShapeError,
          "need at least as many columns (" + std::to_string(cols) +
              ") as sensors (" + std::to_string(n) + ")");

  Eigen::JacobiSVD<ComplexMatrix> svd(data.entries(),
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  ModeEstimate est;
  est.mode_shapes = svd.matrixU();
  est.singular_values = svd.singularValues();
  est.right_factors = svd.matrixV().adjoint();
  for (Index j = 0; j < n; ++j) {
    ComplexVector col = est.mode_shapes.col(j);
    const Complex phase = canonicalize_phase(col);
    est.mode_shapes.col(j) = col;
    est.right_factors.row(j) *= std::conj(phase);
  }
  est.source_kind = data.kind();
  est.source_scheme = data.schedule().scheme();
  est.source_interval = data.schedule().sampling_interval();
  return est;
}

/// min over |c| = 1 of ||truth - c * estimate||_2.
template <typename A, typename B>
double aligned_error(const Eigen::MatrixBase<A>& truth,
                     const Eigen::MatrixBase<B>& estimate) {
  const ComplexVector t = truth.template cast<Complex>();
  const ComplexVector e = estimate.template cast<Complex>();
  const Complex inner = e.dot(t);  // e^H t
  const double mag = std::abs(inner);
  const Complex c = mag > 0.0 ? inner / mag : Complex(1.0, 0.0);
  return std::min((t - c * e).norm(), std::numbers::sqrt2);
}

/// Truth-mode index paired with each estimated mode: the j-th largest
/// singular value goes with the j-th largest |A_n| (stable on ties).
inline std::vector<Index> amplitude_rank_order(const ModalBasis& truth) {
  require(truth.has_amplitudes(), ErrorKind::kInvalidArgument,
          "pairing by amplitude needs amplitudes");
  std::vector<Index> order(static_cast<std::size_t>(truth.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(truth.amplitudes()(a)) > std::abs(truth.amplitudes()(b));
  });
  return order;
}

/// Per-mode aligned error, indexed like the truth basis. Estimates are paired
/// to truth modes by descending singular value vs. descending |A_n|.
inline RealVector align_and_error(const ModeEstimate& est, const ModalBasis& truth) {
  require(est.size() == truth.size() &&
              est.mode_shapes.rows() == truth.mode_shapes().rows(),
          ErrorKind::kDimensionMismatch, "estimate and truth sizes differ");
  const auto order = amplitude_rank_order(truth);
  RealVector err(truth.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const Index n = order[j];
    err(n) = aligned_error(truth.mode_shapes().col(n),
                           est.mode_shapes.col(static_cast<Index>(j)));
  }
  return err;
}

/// Diagnostic pairing: repeatedly take the (estimate, reference) pair with
/// the largest |<est, ref>| among those still unmatched. Returns, for each
/// reference column, the matched estimate column.
template <typename E, typename R>
std::vector<Index> match_by_correlation(const Eigen::MatrixBase<E>& estimates,
                                        const Eigen::MatrixBase<R>& references) {
  const Index ne = estimates.cols();
  const Index nr = references.cols();
  require(ne >= nr, ErrorKind::kInvalidArgument,
          "need at least as many estimates as references");
  const ComplexMatrix corr =
      (estimates.template cast<Complex>().adjoint() * references.template cast<Complex>());
  std::vector<Index> match(static_cast<std::size_t>(nr), -1);
  std::vector<bool> used_e(static_cast<std::size_t>(ne), false);
  for (Index round = 0; round < nr; ++round) {
    double best = -1.0;
    Index bi = 0;
    Index bj = 0;
    for (Index i = 0; i < ne; ++i) {
      if (used_e[static_cast<std::size_t>(i)]) continue;
      for (Index j = 0; j < nr; ++j) {
        if (match[static_cast<std::size_t>(j)] >= 0) continue;
        const double v = std::abs(corr(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    used_e[static_cast<std::size_t>(bi)] = true;
    match[static_cast<std::size_t>(bj)] = bi;
  }
  return match;
}

/// Zero-padded FFT magnitudes of each row of right_factors.
struct RowSpectra {
  RealVector grid;                     ///< rad/s, bins over [0, 2 pi / T_s)
  std::vector<RealVector> magnitudes;  ///< one per estimated mode
  std::vector<Index> peak_bins;
  RealVector peak_frequencies;
};

inline RowSpectra row_spectra(const ModeEstimate& est, double sampling_interval,
                              Index zero_pad_factor = 8) {
  require(est.source_kind == DataKind::kRaw && est.source_scheme == Scheme::kUniform,
          ErrorKind::kNonUniformSchedule,
          "frequency estimation needs uniformly sampled, uncompressed data");
  require(sampling_interval > 0.0 && zero_pad_factor >= 1,
          ErrorKind::kInvalidArgument, "need T_s > 0 and zero_pad_factor >= 1");
  require(std::abs(sampling_interval - est.source_interval) <=
              1e-12 * est.source_interval,
          ErrorKind::kInvalidArgument,
          "T_s does not match the schedule the data was sampled on");

  const Index m = est.right_factors.cols();
  const Index len = m * zero_pad_factor;
  RowSpectra out;
  out.grid.resize(len);
  for (Index k = 0; k < len; ++k) {
    out.grid(k) = 2.0 * std::numbers::pi * static_cast<double>(k) /
                  (static_cast<double>(len) * sampling_interval);
  }
  out.peak_frequencies.resize(est.size());

  Eigen::FFT<double> fft;
  std::vector<Complex> padded(static_cast<std::size_t>(len));
  std::vector<Complex> spectrum;
  for (Index r = 0; r < est.size(); ++r) {
    std::fill(padded.begin(), padded.end(), Complex(0.0, 0.0));
    for (Index j = 0; j < m; ++j) padded[static_cast<std::size_t>(j)] = est.right_factors(r, j);
    fft.fwd(spectrum, padded);
    RealVector mag(len);
    for (Index k = 0; k < len; ++k) mag(k) = std::abs(spectrum[static_cast<std::size_t>(k)]);
    Index peak = 0;
    mag.maxCoeff(&peak);
    out.magnitudes.push_back(std::move(mag));
    out.peak_bins.push_back(peak);
    out.peak_frequencies(r) = out.grid(peak);
  }
  return out;
}

/// Peak frequency (rad/s) of each right-factor row, in singular-value order.
inline RealVector estimate_frequencies(const ModeEstimate& est,
                                       double sampling_interval,
                                       Index zero_pad_factor = 8) {
  return row_spectra(est, sampling_interval, zero_pad_factor).peak_frequencies;
}

}  // namespace modal_cs
