#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "modal_cs/harness/config.hpp"
#include "modal_cs/mdof.hpp"
#include "modal_cs/random.hpp"
#include "test_util.hpp"

using namespace modal_cs;

namespace {

double residual(const MdofSystem& s, const ModalBasis& b, Index j) {
  const double w = b.frequencies()(j);
  return ((s.stiffness() - w * w * s.mass()) * b.mode_shapes().col(j)).norm();
}

}  // namespace

TEST(MdofSystem, RejectsNonDiagonalMass) {
  RealMatrix m = RealMatrix::Identity(2, 2);
  m(0, 1) = 0.1;
  try {
    MdofSystem(m, RealMatrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotSymmetric);
  }
}

TEST(MdofSystem, RejectsNonPositiveMass) {
  RealMatrix m = RealMatrix::Identity(2, 2);
  m(1, 1) = 0.0;
  EXPECT_THROW(MdofSystem(m, RealMatrix::Identity(2, 2)), Error);
}

TEST(MdofSystem, RejectsAsymmetricStiffness) {
  try {
    MdofSystem::unit_mass(chain4_printed());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotSymmetric);
  }
}

TEST(MdofSystem, AcceptsSymmetryWithinTolerance) {
  RealMatrix k = chain4_stiffness();
  k(0, 1) += 1e-14;
  EXPECT_NO_THROW(MdofSystem::unit_mass(k));
}

TEST(MdofSystem, ShapeMismatch) {
  try {
    MdofSystem(RealMatrix::Identity(3, 3), RealMatrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeError);
  }
}

TEST(SolveModes, DiagonalPencil) {
  RealMatrix k = RealMatrix::Zero(2, 2);
  k.diagonal() << 4.0, 1.0;
  const auto b = solve_modes(MdofSystem::unit_mass(k));
  EXPECT_NEAR(b.frequencies()(0), 2.0, 1e-14);
  EXPECT_NEAR(b.frequencies()(1), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(b.mode_shapes()(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(b.mode_shapes()(1, 1)), 1.0, 1e-14);
}

TEST(SolveModes, TwoByTwoByHand) {
  RealMatrix k(2, 2);
  k << 2, -1, -1, 2;
  const auto b = solve_modes(MdofSystem::unit_mass(k));
  EXPECT_NEAR(b.frequencies()(0), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(b.frequencies()(1), 1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  // (1, -1)/sqrt2 up to sign; ties in magnitude keep the first entry as pivot.
  EXPECT_NEAR(std::abs(b.mode_shapes()(0, 0)), h, 1e-14);
  EXPECT_NEAR(b.mode_shapes()(0, 0), -b.mode_shapes()(1, 0), 1e-14);
  EXPECT_NEAR(b.mode_shapes()(0, 1), h, 1e-14);
  EXPECT_NEAR(b.mode_shapes()(1, 1), h, 1e-14);
}

TEST(SolveModes, SymmetrizedChainMatchesDenseOracle) {
  // Frozen from a dense symmetric eigensolver (LAPACK syevd).
  const double freq[4] = {1.8602163350645389, 1.5304805861202715, 1.2874894855916106,
                          0.7345714306716913};
  const double shapes[4][4] = {
      {0.18149163746268093, 0.6834184556559141, 0.6834184556559142, 0.18149163746268093},
      {-0.5301025218269596, -0.4679650802706306, 0.4679650802706305, 0.5301025218269597},
      {0.6834184556559143, -0.18149163746268082, -0.18149163746268085, 0.6834184556559149},
      {-0.467965080270631, 0.5301025218269596, -0.5301025218269593, 0.4679650802706308}};
  const MdofSystem sys = MdofSystem::unit_mass(chain4_stiffness());
  const auto b = solve_modes(sys);
  for (Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(b.frequencies()(j), freq[j], 1e-13);
    EXPECT_LE(residual(sys, b, j), 1e-8 * spectral_norm(sys.stiffness()));
    for (Index i = 0; i < 4; ++i) EXPECT_NEAR(b.mode_shapes()(i, j), shapes[i][j], 1e-12);
  }
  EXPECT_LE(b.orthonormality_defect(), 1e-10);
}

TEST(SolveModes, LargestEntryPositive) {
  const auto b = solve_modes(MdofSystem::unit_mass(chain_stiffness(7, 3.0)));
  for (Index j = 0; j < b.size(); ++j) {
    EXPECT_GT(b.mode_shapes()(argmax_abs(b.mode_shapes().col(j)), j), 0.0);
  }
}

TEST(SolveModes, NonPositiveEigenvalue) {
  RealMatrix k(2, 2);
  k << 1, -1, -1, 1;  // rigid-body mode
  try {
    solve_modes(MdofSystem::unit_mass(k));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonPositiveEigenvalue);
  }
  RealMatrix neg = -RealMatrix::Identity(2, 2);
  neg(0, 0) = 1.0;
  EXPECT_THROW(solve_modes(MdofSystem::unit_mass(neg)), Error);
}

TEST(SolveModes, RepeatedFrequencyRejected) {
  try {
    solve_modes(MdofSystem::unit_mass(RealMatrix::Identity(3, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateSpectrum);
  }
}

TEST(SolveModes, ResidualOverRandomSystems) {
  CounterRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(9));
    RealMatrix g(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
    RealMatrix k = g * g.transpose() + RealMatrix::Identity(n, n);
    k = 0.5 * (k + k.transpose()).eval();
    RealMatrix m = RealMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = rng.uniform(0.5, 2.0);
    const MdofSystem sys(m, k);
    const auto b = solve_modes(sys);
    for (Index j = 0; j < n; ++j) {
      EXPECT_LE(residual(sys, b, j), 1e-8 * spectral_norm(k));
      EXPECT_NEAR(b.mode_shapes().col(j).norm(), 1.0, 1e-12);
      if (j > 0) {
        EXPECT_GT(b.frequencies()(j - 1), b.frequencies()(j));
      }
    }
  }
}

TEST(SolveModes, OrthonormalForScalarMass) {
  const MdofSystem sys(2.5 * RealMatrix::Identity(6, 6), chain_stiffness(6, 1.0));
  EXPECT_LE(solve_modes(sys).orthonormality_defect(), 1e-10);
}

TEST(ModalBasis, Validation) {
  RealVector f(2);
  f << 1.0, 2.0;  // ascending
  EXPECT_THROW(ModalBasis(RealMatrix::Identity(2, 2), f), Error);
  f << 2.0, -1.0;
  EXPECT_THROW(ModalBasis(RealMatrix::Identity(2, 2), f), Error);
  f << 2.0, 1.0;
  EXPECT_THROW(ModalBasis(2.0 * RealMatrix::Identity(2, 2), f), Error);
  EXPECT_NO_THROW(ModalBasis(RealMatrix::Identity(2, 2), f));
}

TEST(ModalBasis, GammaIsScaledDiagonal) {
  RealVector f(2);
  f << 2.0, 1.0;
  ComplexVector a(2);
  a << Complex(1, 1), Complex(0.5, 0);
  const ModalBasis b(RealMatrix::Identity(2, 2), f, a);
  const ComplexMatrix g = b.gamma(9);
  EXPECT_EQ(g(0, 0), Complex(3, 3));
  EXPECT_EQ(g(1, 1), Complex(1.5, 0));
  EXPECT_EQ(g(0, 1), Complex(0, 0));
}

TEST(SortModes, KeepsTriplesTogether) {
  RealMatrix s = RealMatrix::Identity(3, 3);
  RealVector f(3);
  f << 1.0, 3.0, 2.0;
  ComplexVector a(3);
  a << 10.0, 30.0, 20.0;
  const auto ob = sort_modes(s, f, a);
  EXPECT_EQ(ob.order, (std::vector<Index>{1, 2, 0}));
  EXPECT_EQ(ob.basis.frequencies()(0), 3.0);
  EXPECT_EQ(ob.basis.amplitudes()(0), Complex(30.0, 0));
  EXPECT_EQ(ob.basis.mode_shapes()(1, 0), 1.0);
}

TEST(SdofResponse, CosineCase) {
  const auto [rho, theta] = sdof_response_params(1.0, 0.0);
  EXPECT_DOUBLE_EQ(rho, 2.0);
  EXPECT_NEAR(theta, std::numbers::pi / 2, 1e-15);
}

TEST(SdofResponse, SineCase) {
  const auto [rho, theta] = sdof_response_params(0.0, -1.0);
  EXPECT_DOUBLE_EQ(rho, 2.0);
  EXPECT_EQ(theta, 0.0);
}

TEST(SdofResponse, UpperBranchPointwise) {
  const auto [rho, theta] = sdof_response_params(1.0, 1.0);
  EXPECT_NEAR(rho, 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(theta, 3.0 * std::numbers::pi / 4, 1e-15);
  const double w0 = 3.7;
  for (double s : {0.0, 0.1, 0.7}) {
    const double t = s / w0;
    EXPECT_NEAR(rho * std::sin(w0 * t + theta),
                2.0 * std::cos(w0 * t) - 2.0 * std::sin(w0 * t), 1e-14);
  }
}

TEST(SdofResponse, ZeroConvention) {
  const auto [rho, theta] = sdof_response_params(0.0, 0.0);
  EXPECT_EQ(rho, 0.0);
  EXPECT_EQ(theta, 0.0);
}

TEST(SdofResponse, PointwiseIdentityAndThetaRange) {
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-3, 3);
    const double b = rng.uniform(-3, 3);
    const auto [rho, theta] = sdof_response_params(a, b);
    EXPECT_GT(theta, -std::numbers::pi / 2 - 1e-15);
    EXPECT_LE(theta, 3 * std::numbers::pi / 2 + 1e-15);
    for (double t : {0.0, 0.31, 1.7}) {
      EXPECT_NEAR(rho * std::sin(2.0 * t + theta), 2 * a * std::cos(2 * t) - 2 * b * std::sin(2 * t),
                  1e-12);
    }
  }
}

TEST(SdofParams, FromPhysicalConstants) {
  const auto p = sdof_params(2.0, 0.4, 8.0, Complex(0.5, 0.0));
  EXPECT_DOUBLE_EQ(p.natural_frequency, 2.0);
  EXPECT_DOUBLE_EQ(p.damping_ratio, 0.05);
  EXPECT_DOUBLE_EQ(p.rho, 1.0);
  const auto [s1, s2] = sdof_roots(2.0, 0.05);
  EXPECT_NEAR(s1.real(), -0.1, 1e-15);
  EXPECT_NEAR(s1.imag(), 2.0 * std::sqrt(1 - 0.0025), 1e-14);
  EXPECT_EQ(s2, std::conj(s1));
}

TEST(EvaluateDisplacement, ZeroAmplitudes) {
  const auto truth = test::preset_truth("exp1");
  const auto b = truth.basis.with_amplitudes(ComplexVector::Zero(4));
  for (double t : {0.0, 0.5, 3.3}) EXPECT_EQ(evaluate_displacement(b, t).norm(), 0.0);
}

TEST(EvaluateDisplacement, SingleCosine) {
  RealVector f(1);
  f << 2.0;
  ComplexVector a(1);
  a << 0.5;
  const ModalBasis b(RealMatrix::Identity(1, 1), f, a);
  for (double t : {0.0, 0.4, 1.9}) EXPECT_NEAR(evaluate_displacement(b, t)(0), std::cos(2 * t), 1e-15);
}

TEST(EvaluateDisplacement, AtZeroIsTwiceRealPart) {
  const auto& b = test::preset_truth("exp1").basis;
  const RealVector expect = 2.0 * (b.mode_shapes().cast<Complex>() * b.amplitudes()).real();
  EXPECT_LE((evaluate_displacement(b, 0.0) - expect).norm(), 1e-14);
}

TEST(EvaluateAnalytic, AtZero) {
  const auto& b = test::preset_truth("exp1").basis;
  EXPECT_LE((evaluate_analytic(b, 0.0) - b.mode_shapes().cast<Complex>() * b.amplitudes()).norm(), 1e-15);
}

TEST(EvaluateAnalytic, HalfTurn) {
  RealVector f(1);
  f << std::numbers::pi;
  ComplexVector a(1);
  a << 1.0;
  const ModalBasis b(RealMatrix::Identity(1, 1), f, a);
  EXPECT_NEAR(std::abs(evaluate_analytic(b, 1.0)(0) - Complex(-1, 0)), 0.0, 1e-15);
}

TEST(EvaluateAnalytic, TermwiseOracle) {
  const auto& b = test::preset_truth("exp1").basis;
  const double t = 0.37;
  ComplexVector expect = ComplexVector::Zero(4);
  for (Index n = 0; n < 4; ++n) {
    for (Index l = 0; l < 4; ++l) {
      expect(l) += b.mode_shapes()(l, n) * b.amplitudes()(n) *
                   Complex(std::cos(b.frequencies()(n) * t), std::sin(b.frequencies()(n) * t));
    }
  }
  EXPECT_LE((evaluate_analytic(b, t) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EvaluateAnalytic, RealPartConsistencyProperty) {
  const auto& base = test::preset_truth("exp1").basis;
  CounterRng rng(99);
  ComplexVector a(4);
  for (Index i = 0; i < 4; ++i) a(i) = Complex(rng.normal(), rng.normal());
  const auto b = base.with_amplitudes(a);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(-20.0, 20.0);
    EXPECT_LE((2.0 * evaluate_analytic(b, t).real() - evaluate_displacement(b, t)).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(AnalyticFromReal, OnGridTone) {
  const std::size_t m = 64;
  for (std::size_t k : {1u, 5u, 31u}) {
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = std::cos(2 * std::numbers::pi * double(k * i) / double(m));
    const auto z = analytic_from_real(x);
    for (std::size_t i = 0; i < m; ++i) {
      const double ang = 2 * std::numbers::pi * double(k * i) / double(m);
      EXPECT_NEAR(std::abs(z[i] - std::polar(1.0, ang)), 0.0, 1e-9);
    }
  }
}

TEST(AnalyticFromReal, ConstantAndTwoTones) {
  const std::size_t m = 45;  // odd length
  std::vector<double> c(m, 2.5);
  for (const auto& v : analytic_from_real(c)) EXPECT_NEAR(std::abs(v - Complex(2.5, 0)), 0.0, 1e-12);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = 0.3 * std::cos(2 * std::numbers::pi * 3.0 * double(i) / double(m)) +
           1.1 * std::cos(2 * std::numbers::pi * 11.0 * double(i) / double(m));
  }
  const auto z = analytic_from_real(x);
  for (std::size_t i = 0; i < m; ++i) {
    const Complex e = 0.3 * std::polar(1.0, 2 * std::numbers::pi * 3.0 * double(i) / double(m)) +
                      1.1 * std::polar(1.0, 2 * std::numbers::pi * 11.0 * double(i) / double(m));
    EXPECT_NEAR(std::abs(z[i] - e), 0.0, 1e-9);
  }
}

TEST(AnalyticFromReal, NoNegativeFrequencyEnergyAndRealPartKept) {
  CounterRng rng(3);
  for (std::size_t m : {2u, 17u, 64u}) {
    std::vector<double> x(m);
    for (auto& v : x) v = rng.normal();
    const auto z = analytic_from_real(x);
    std::vector<Complex> spec;
    Eigen::FFT<double> fft;
    std::vector<Complex> zc(z.begin(), z.end());
    fft.fwd(spec, zc);
    double neg = 0.0;
    double tot = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      tot += std::norm(spec[k]);
      if (k > m / 2) neg += std::norm(spec[k]);
    }
    EXPECT_LE(neg, 1e-20 * tot);
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(z[i].real(), x[i], 1e-9 * (1 + std::abs(x[i])));
  }
}

TEST(AnalyticFromReal, ProjectionProperty) {
  const std::size_t m = 50;
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::sin(2 * std::numbers::pi * 4.0 * double(i) / double(m)) +
           0.2 * std::cos(2 * std::numbers::pi * 9.0 * double(i) / double(m));
  }
  const auto z = analytic_from_real(x);
  std::vector<double> re(m);
  for (std::size_t i = 0; i < m; ++i) re[i] = z[i].real();
  const auto z2 = analytic_from_real(re);
  for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(std::abs(z[i] - z2[i]), 0.0, 1e-12);
}

TEST(AnalyticFromReal, TooShort) {
  std::vector<double> x(1, 1.0);
  EXPECT_THROW(analytic_from_real(x), Error);
}
