#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "modal_cs/svd_estimator.hpp"
#include "test_util.hpp"

using namespace modal_cs;

namespace {

// N on-grid frequencies 2 pi k / (M T_s) with distinct bins.
ModalBasis on_grid_system(Index n, Index m, double ts, CounterRng& rng, bool distinct_amps = true) {
  std::vector<Index> bins;
  while (static_cast<Index>(bins.size()) < n) {
    const Index k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m / 2 - 1)));
    if (std::find(bins.begin(), bins.end(), k) == bins.end()) bins.push_back(k);
  }
  std::sort(bins.rbegin(), bins.rend());
  RealVector f(n);
  for (Index i = 0; i < n; ++i) f(i) = 2 * std::numbers::pi * double(bins[size_t(i)]) / (double(m) * ts);
  ComplexVector a(n);
  for (Index i = 0; i < n; ++i) {
    const double mag = distinct_amps ? 1.0 / double(1 + i) + 0.05 * rng.uniform01() : 1.0;
    a(i) = std::polar(mag, rng.uniform(0, 2 * std::numbers::pi));
  }
  return ModalBasis(test::random_orthonormal(n, rng), f, a);
}

}  // namespace

TEST(EstimateModes, OnGridRecoversExactly) {
  CounterRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = on_grid_system(4, 32, 0.1, rng);
    const auto est = estimate_modes(build_data_matrix(b, uniform_schedule(0.1, 32)));
    EXPECT_LE(align_and_error(est, b).maxCoeff(), 1e-10);
    // Singular values are sqrt(M) |A| in rank order.
    const auto order = amplitude_rank_order(b);
    for (Index j = 0; j < 4; ++j) {
      EXPECT_NEAR(est.singular_values(j), std::sqrt(32.0) * std::abs(b.amplitudes()(order[size_t(j)])), 1e-10);
    }
  }
}

TEST(EstimateModes, CanonicalPhaseAndReconstruction) {
  const auto& b = test::preset_truth("exp1").basis;
  const auto v = build_data_matrix(b, random_schedule(4.0, 40, 5));
  const auto est = estimate_modes(v);
  for (Index j = 0; j < est.size(); ++j) {
    const Complex p = est.mode_shapes(argmax_abs(est.mode_shapes.col(j)), j);
    EXPECT_NEAR(p.imag(), 0.0, 1e-14);
    EXPECT_GT(p.real(), 0.0);
    EXPECT_NEAR(est.mode_shapes.col(j).norm(), 1.0, 1e-12);
    if (j) {
      EXPECT_GE(est.singular_values(j - 1), est.singular_values(j));
    }
  }
  EXPECT_LE(max_abs(est.reconstruct() - v.entries()), 1e-10 * max_abs(v.entries()));
}

TEST(EstimateModes, RankOneData) {
  RealVector f(2);
  f << 3.0, 1.0;
  ComplexVector a(2);
  a << Complex(0.7, 0.2), 0.0;
  const ModalBasis b(RealMatrix::Identity(2, 2), f, a);
  const auto est = estimate_modes(build_data_matrix(b, uniform_schedule(0.1, 10)));
  EXPECT_LE(est.singular_values(1), 1e-12 * est.singular_values(0));
  EXPECT_TRUE(est.reliable()[0]);
  EXPECT_FALSE(est.reliable()[1]);
  EXPECT_LE(aligned_error(b.mode_shapes().col(0), est.mode_shapes.col(0)), 1e-12);
}

TEST(EstimateModes, PresetSystemBelowTenth) {
  const auto& b = test::preset_truth("exp1").basis;
  const auto est = estimate_modes(build_data_matrix(b, uniform_schedule(0.1, 21)));
  EXPECT_LT(align_and_error(est, b).maxCoeff(), 0.1);
}

TEST(EstimateModes, TooFewColumns) {
  const auto& b = test::preset_truth("exp1").basis;
  try {
    estimate_modes(build_data_matrix(b, uniform_schedule(0.1, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeError);
  }
}

TEST(AlignedError, Cases) {
  RealVector e0(2);
  e0 << 1, 0;
  RealVector e1(2);
  e1 << 0, 1;
  EXPECT_NEAR(aligned_error(e0, e1), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(aligned_error(e0, e0), 0.0);
  EXPECT_NEAR(aligned_error(e0, -e0), 0.0, 1e-15);
  ComplexVector rot = e0.cast<Complex>() * Complex(0, 1);
  EXPECT_NEAR(aligned_error(e0, rot), 0.0, 1e-15);
  RealVector diag(2);
  diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(aligned_error(e0, diag), std::sqrt(2 - std::sqrt(2.0)), 1e-14);
}

TEST(AlignedError, PhaseInvarianceAndRange) {
  CounterRng rng(8);
  for (int i = 0; i < 200; ++i) {
    ComplexVector x(5);
    ComplexVector y(5);
    for (Index k = 0; k < 5; ++k) {
      x(k) = Complex(rng.normal(), rng.normal());
      y(k) = Complex(rng.normal(), rng.normal());
    }
    x.normalize();
    y.normalize();
    const double e = aligned_error(x, y);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, std::sqrt(2.0));
    const Complex c = std::polar(1.0, rng.uniform(0, 6.28));
    EXPECT_NEAR(aligned_error(x, ComplexVector(c * y)), e, 1e-12);
  }
}

TEST(AmplitudeRankOrder, Ties) {
  RealVector f(3);
  f << 3, 2, 1;
  ComplexVector a(3);
  a << 0.5, Complex(0, 1), -0.5;
  const ModalBasis b(RealMatrix::Identity(3, 3), f, a);
  EXPECT_EQ(amplitude_rank_order(b), (std::vector<Index>{1, 0, 2}));
}

TEST(MatchByCorrelation, Greedy) {
  ComplexMatrix est = ComplexMatrix::Identity(3, 3);
  RealMatrix ref = RealMatrix::Zero(3, 2);
  ref(2, 0) = 1;
  ref(0, 1) = 1;
  EXPECT_EQ(match_by_correlation(est, ref), (std::vector<Index>{2, 0}));
  EXPECT_THROW(match_by_correlation(ComplexMatrix(est.leftCols(1)), ref), Error);
}

TEST(EstimateFrequencies, SingleToneOnGrid) {
  const double ts = 0.05;
  const Index m = 64;
  RealVector f(1);
  f << 2 * std::numbers::pi * 7 / (m * ts);
  ComplexVector a(1);
  a << 1.0;
  const ModalBasis b(RealMatrix::Identity(1, 1), f, a);
  const auto est = estimate_modes(build_data_matrix(b, uniform_schedule(ts, m)));
  EXPECT_NEAR(estimate_frequencies(est, ts)(0), f(0), 1e-12);
}

TEST(EstimateFrequencies, OffGridWithinResolution) {
  const double ts = 0.03;
  const Index m = 202;
  RealVector f(2);
  f << 20.5 * std::numbers::pi, 6.24 * std::numbers::pi;
  ComplexVector a(2);
  a << 1.0, 0.4;
  const ModalBasis b(RealMatrix::Identity(2, 2), f, a);
  const auto est = estimate_modes(build_data_matrix(b, uniform_schedule(ts, m)));
  const auto w = estimate_frequencies(est, ts);
  const double res = 2 * std::numbers::pi / (double(m - 1) * ts);
  EXPECT_NEAR(w(0), f(0), res);
  EXPECT_NEAR(w(1), f(1), res);
}

TEST(EstimateFrequencies, SwappedTwoDof) {
  // The larger amplitude sits on the lower frequency, so the first singular
  // vector belongs to the second basis mode.
  const double ts = 0.05;
  const Index m = 128;
  RealVector f(2);
  f << 2 * std::numbers::pi * 20 / (m * ts), 2 * std::numbers::pi * 6 / (m * ts);
  ComplexVector a(2);
  a << 0.2, 1.0;
  const double h = 1 / std::sqrt(2.0);
  RealMatrix psi(2, 2);
  psi << h, h, -h, h;
  const ModalBasis b(psi, f, a);
  const auto est = estimate_modes(build_data_matrix(b, uniform_schedule(ts, m)));
  const auto w = estimate_frequencies(est, ts);
  EXPECT_NEAR(w(0), f(1), 1e-12);
  EXPECT_NEAR(w(1), f(0), 1e-12);
  EXPECT_LE(align_and_error(est, b).maxCoeff(), 1e-10);
}

TEST(EstimateFrequencies, RejectsRandomAndCompressed) {
  const auto& b = test::preset_truth("exp1").basis;
  const auto est = estimate_modes(build_data_matrix(b, random_schedule(2.0, 30, 1)));
  try {
    estimate_frequencies(est, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonUniformSchedule);
  }
  const auto v = build_data_matrix(b, uniform_schedule(0.1, 30));
  const auto y = compress(v, draw_jl_matrix(30, 10, JlKind::kGaussian, 1));
  EXPECT_THROW(estimate_frequencies(estimate_modes(y), 0.1), Error);
  EXPECT_THROW(estimate_frequencies(estimate_modes(v), 0.2), Error);
}

TEST(EstimateModes, MoreSamplesHelpOnAverage) {
  // Mean error over seeds drops as a random schedule gets longer.
  const auto& b = test::preset_truth("exp1").basis;
  auto mean_err = [&](double tmax, Index m) {
    double s = 0.0;
    for (std::uint64_t k = 0; k < 30; ++k) {
      s += align_and_error(estimate_modes(build_data_matrix(b, random_schedule(tmax, m, k))), b).maxCoeff();
    }
    return s / 30;
  };
  EXPECT_LT(mean_err(20.0, 200), mean_err(2.0, 20));
}
