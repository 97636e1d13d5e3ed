#pragma once

// Sample schedules, the steering matrix S, the data matrix V = Psi Gamma S,
// random JL compression matrices Phi, and compressed measurements Y = V Phi.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/mdof.hpp"
#include "modal_cs/random.hpp"

namespace modal_cs {

enum class Scheme { kUniform, kRandom };

class SampleSchedule {
 public:
  Scheme scheme() const noexcept { return scheme_; }
  bool is_uniform() const noexcept { return scheme_ == Scheme::kUniform; }
  const std::vector<double>& times() const noexcept { return times_; }
  Index size() const noexcept { return static_cast<Index>(times_.size()); }
  double t_max() const noexcept { return t_max_; }
  /// Sampling interval T_s; only meaningful for uniform schedules.
  double sampling_interval() const noexcept { return interval_; }
  /// Seed of a random schedule.
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  friend SampleSchedule uniform_schedule(double sampling_interval, Index samples);
  friend SampleSchedule random_schedule(double t_max, Index samples,
                                        std::uint64_t seed);

 private:
  SampleSchedule() = default;

  Scheme scheme_ = Scheme::kUniform;
  std::vector<double> times_;
  double t_max_ = 0.0;
  double interval_ = 0.0;
  std::optional<std::uint64_t> seed_;
};

/// t_m = (m - 1) T_s for m = 1..M.
inline SampleSchedule uniform_schedule(double sampling_interval, Index samples) {
  require(std::isfinite(sampling_interval) && sampling_interval > 0.0,
          ErrorKind::kInvalidArgument, "sampling interval must be positive");
  require(samples >= 1, ErrorKind::kInvalidArgument, "need at least one sample");
  SampleSchedule s;
  s.scheme_ = Scheme::kUniform;
  s.interval_ = sampling_interval;
  s.times_.resize(static_cast<std::size_t>(samples));
  for (Index m = 0; m < samples; ++m) {
    s.times_[static_cast<std::size_t>(m)] = static_cast<double>(m) * sampling_interval;
  }
  s.t_max_ = static_cast<double>(samples - 1) * sampling_interval;
  return s;
}

/// M i.i.d. uniform times on [0, t_max], sorted. Exact ties are re-drawn
/// from the same stream, so the result is still a function of the seed.
inline SampleSchedule random_schedule(double t_max, Index samples,
                                      std::uint64_t seed) {
  require(std::isfinite(t_max) && t_max > 0.0, ErrorKind::kInvalidArgument,
          "t_max must be positive");
  require(samples >= 1, ErrorKind::kInvalidArgument, "need at least one sample");
  CounterRng rng(seed);
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (auto& v : t) v = t_max * rng.uniform01();
  std::sort(t.begin(), t.end());
  for (;;) {
    auto dup = std::adjacent_find(t.begin(), t.end());
    if (dup == t.end()) break;
    *dup = t_max * rng.uniform01();
    std::sort(t.begin(), t.end());
  }
  SampleSchedule s;
  s.scheme_ = Scheme::kRandom;
  s.times_ = std::move(t);
  s.t_max_ = t_max;
  s.seed_ = seed;
  return s;
}

/// Number of uniform samples covering [0, t_max] at interval T_s, tolerant
/// of t_max / T_s landing a rounding error below an integer.
inline Index uniform_sample_count(double t_max, double sampling_interval) {
  require(sampling_interval > 0.0 && t_max >= 0.0, ErrorKind::kInvalidArgument,
          "need T_s > 0 and t_max >= 0");
  return static_cast<Index>(std::floor(t_max / sampling_interval + 1e-9)) + 1;
}

/// Sampled modal coordinates: entry (n, m) = e^{i w_n t_m} / sqrt(M).
class SteeringMatrix {
 public:
  explicit SteeringMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {}
  const ComplexMatrix& entries() const noexcept { return entries_; }
  Index modes() const noexcept { return entries_.rows(); }
  Index samples() const noexcept { return entries_.cols(); }
  /// S S^*.
  ComplexMatrix gram() const { return entries_ * entries_.adjoint(); }

 private:
  ComplexMatrix entries_;
};

inline SteeringMatrix build_steering(const RealVector& frequencies,
                                     const SampleSchedule& schedule) {
  const Index n = frequencies.size();
  const Index m = schedule.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  ComplexMatrix s(n, m);
  for (Index j = 0; j < m; ++j) {
    const double t = schedule.times()[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      s(i, j) = std::polar(scale, frequencies(i) * t);
    }
  }
  return SteeringMatrix(std::move(s));
}

enum class DataKind { kRaw, kCompressed };

/// An N x M (raw) or N x M' (compressed) block of sensor data.
class DataMatrix {
 public:
  DataMatrix(ComplexMatrix entries, DataKind kind, SampleSchedule schedule,
             std::optional<std::uint64_t> compression_seed = std::nullopt)
      : entries_(std::move(entries)),
        kind_(kind),
        schedule_(std::move(schedule)),
        compression_seed_(compression_seed) {
    require(kind_ == DataKind::kCompressed || entries_.cols() == schedule_.size(),
            ErrorKind::kDimensionMismatch,
            "raw data needs one column per scheduled sample");
  }

  /// Real-valued sensor samples (one row per sensor) taken on `schedule`.
  static DataMatrix from_real(const RealMatrix& samples, SampleSchedule schedule) {
    return DataMatrix(samples.cast<Complex>(), DataKind::kRaw, std::move(schedule));
  }

  const ComplexMatrix& entries() const noexcept { return entries_; }
  DataKind kind() const noexcept { return kind_; }
  const SampleSchedule& schedule() const noexcept { return schedule_; }
  std::optional<std::uint64_t> compression_seed() const noexcept {
    return compression_seed_;
  }
  Index rows() const noexcept { return entries_.rows(); }
  Index cols() const noexcept { return entries_.cols(); }

 private:
  ComplexMatrix entries_;
  DataKind kind_;
  SampleSchedule schedule_;
  std::optional<std::uint64_t> compression_seed_;
};

/// V(l, m) = sum_n psi_n(l) A_n e^{i w_n t_m}.
inline DataMatrix build_data_matrix(const ModalBasis& basis,
                                    const SampleSchedule& schedule) {
  require(basis.has_amplitudes(), ErrorKind::kInvalidArgument, "amplitudes unset");
  const Index n = basis.size();
  const Index m = schedule.size();
  ComplexMatrix modal(n, m);
  for (Index j = 0; j < m; ++j) {
    const double t = schedule.times()[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      modal(i, j) = basis.amplitudes()(i) * std::polar(1.0, basis.frequencies()(i) * t);
    }
  }
  return DataMatrix(basis.mode_shapes().cast<Complex>() * modal, DataKind::kRaw,
                    schedule);
}

/// Analytic extraction is only offered for uniformly sampled data.
inline std::vector<Complex> analytic_from_real(const SampleSchedule& schedule,
                                               std::span<const double> samples) {
  require(schedule.is_uniform(), ErrorKind::kNonUniformInput,
          "analytic signal extraction needs uniformly sampled data");
  require(static_cast<Index>(samples.size()) == schedule.size(),
          ErrorKind::kDimensionMismatch, "sample count does not match schedule");
  return analytic_from_real(samples);
}

enum class JlKind { kGaussian, kBernoulli, kIdentity };

/// M x M' random compression matrix. kIdentity (M' = M) exists for tests.
class JlMatrix {
 public:
  JlMatrix(RealMatrix entries, JlKind kind, std::uint64_t seed)
      : entries_(std::move(entries)), kind_(kind), seed_(seed) {}
  const RealMatrix& entries() const noexcept { return entries_; }
  JlKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Index rows() const noexcept { return entries_.rows(); }
  Index cols() const noexcept { return entries_.cols(); }

 private:
  RealMatrix entries_;
  JlKind kind_;
  std::uint64_t seed_;
};

/// Gaussian: i.i.d. N(0, 1/M'). Bernoulli: i.i.d. +/- 1/sqrt(M').
inline JlMatrix draw_jl_matrix(Index rows, Index cols, JlKind kind,
                               std::uint64_t seed) {
  require(cols >= 1 && rows >= 1, ErrorKind::kInvalidArgument,
          "JL matrix needs positive dimensions");
  require(cols <= rows, ErrorKind::kInvalidArgument,
          "compressed dimension M' must not exceed M");
  if (kind == JlKind::kIdentity) {
    require(cols == rows, ErrorKind::kInvalidArgument, "identity needs M' = M");
    return JlMatrix(RealMatrix::Identity(rows, cols), kind, seed);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  RealMatrix phi(rows, cols);
  CounterRng rng(seed);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      phi(i, j) = scale * (kind == JlKind::kGaussian ? rng.normal() : rng.sign());
    }
  }
  return JlMatrix(std::move(phi), kind, seed);
}

/// Y = V Phi. The real Phi acts on real and imaginary parts independently,
/// which is the same as applying it to each sensor row on its own.
inline DataMatrix compress(const DataMatrix& data, const JlMatrix& phi) {
  require(data.kind() == DataKind::kRaw, ErrorKind::kInvalidArgument,
          "data is already compressed");
  require(data.cols() == phi.rows(), ErrorKind::kDimensionMismatch,
          "V has " + std::to_string(data.cols()) + " columns but Phi has " +
              std::to_string(phi.rows()) + " rows");
  const RealMatrix& p = phi.entries();
  const RealMatrix re = data.entries().real() * p;
  const RealMatrix im = data.entries().imag() * p;
  ComplexMatrix y(data.rows(), p.cols());
  y.real() = re;
  y.imag() = im;
  return DataMatrix(std::move(y), DataKind::kCompressed, data.schedule(), phi.seed());
}

}  // namespace modal_cs
