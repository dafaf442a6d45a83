#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "crq/basis.hpp"
#include "crq/polynomial.hpp"
#include "oracles.hpp"

using namespace crq;

namespace {

Polynomial mono(int a, int b, int c, int d, ComplexRational coeff = ComplexRational(1)) {
  Exponent e;
  e.e = {a, b, c, d};
  return Polynomial::monomial(e, coeff);
}

Polynomial sublaplacian(const Polynomial& f) {
  return apply_vector_field(VectorField::Z1, apply_vector_field(VectorField::Zbar1, f)) +
         apply_vector_field(VectorField::Zbar1, apply_vector_field(VectorField::Z1, f));
}

// f(e^{is} z1, e^{is} z2) differentiated at s = 0 by a centered difference.
std::complex<double> reeb_fd(const Polynomial& f, std::complex<double> z1, std::complex<double> z2) {
  const double h = 1e-5;
  const std::complex<double> ep = std::polar(1.0, h), em = std::polar(1.0, -h);
  return (f.evaluate(ep * z1, ep * z2) - f.evaluate(em * z1, em * z2)) / (2.0 * h);
}

}  // namespace

TEST(Polynomial, ArithmeticDropsZeroTerms) {
  const Polynomial a = mono(1, 0, 0, 0) + mono(0, 1, 0, 0);
  const Polynomial b = a - mono(0, 1, 0, 0);
  EXPECT_EQ(b, mono(1, 0, 0, 0));
  EXPECT_TRUE((a - a).is_zero());
  const Polynomial sq = a * a;
  EXPECT_EQ(sq.coefficient(Exponent{{1, 1, 0, 0}}), ComplexRational(2));
}

TEST(Polynomial, ConjugateSwapsVariables) {
  const Polynomial f = mono(2, 0, 0, 1, ComplexRational(Rational(1), Rational(3)));
  const Polynomial g = f.conj();
  EXPECT_EQ(g.coefficient(Exponent{{0, 1, 2, 0}}), ComplexRational(Rational(1), Rational(-3)));
  const std::complex<double> z1(0.3, 0.4), z2(-0.1, 0.2);
  EXPECT_NEAR(std::abs(g.evaluate(z1, z2) - std::conj(f.evaluate(z1, z2))), 0.0, 1e-15);
}

TEST(VectorField, ReebOnWeightMonomial) {
  for (int p = 0; p <= 4; ++p) {
    for (int q = 0; q <= 4; ++q) {
      const Polynomial f = mono(p, 0, 0, q);
      const Polynomial expected = f * ComplexRational(Rational(0), Rational(p - q));
      EXPECT_EQ(apply_vector_field(VectorField::T, f), expected) << p << "," << q;
    }
  }
}

TEST(VectorField, Z1OfZ1IsZbar2) {
  EXPECT_EQ(apply_vector_field(VectorField::Z1, Polynomial::variable(Var::z1)), Polynomial::variable(Var::zbar2));
}

TEST(VectorField, ReebMatchesFlowDerivative) {
  const Polynomial f = mono(2, 1, 0, 1) + mono(0, 0, 3, 0, ComplexRational(Rational(1), Rational(2))) + mono(1, 0, 1, 2);
  const std::complex<double> z1 = std::polar(std::cos(0.7), 0.3), z2 = std::polar(std::sin(0.7), -1.1);
  const std::complex<double> exact = apply_vector_field(VectorField::T, f).evaluate(z1, z2);
  EXPECT_NEAR(std::abs(exact - reeb_fd(f, z1, z2)), 0.0, 1e-9);
}

TEST(VectorField, FrameIsTangentToSphere) {
  // Z1 and Zbar1 annihilate |z1|^2 + |z2|^2.
  const Polynomial r2 = mono(1, 0, 1, 0) + mono(0, 1, 0, 1);
  EXPECT_TRUE(apply_vector_field(VectorField::Z1, r2).is_zero());
  EXPECT_TRUE(apply_vector_field(VectorField::Zbar1, r2).is_zero());
  EXPECT_TRUE(apply_vector_field(VectorField::T, r2).is_zero());
}

TEST(HarmonicKernel, DimensionAndHarmonicity) {
  for (int p = 0; p <= 4; ++p) {
    for (int q = 0; p + q <= 5; ++q) {
      const auto ker = harmonic_kernel(p, q);
      ASSERT_EQ(ker.size(), static_cast<std::size_t>(p + q + 1));
      for (const auto& y : ker) EXPECT_TRUE(flat_laplacian(y).is_zero());
    }
  }
  EXPECT_EQ(harmonic_kernel(1, 1).size(), 3u);
}

TEST(HarmonicKernel, SymbolicEigenfunctions) {
  // Delta_b = Z1 Zbar1 + Zbar1 Z1 and box_b = -Delta_b + iT act on every Y_{p,q}
  // as scalars, in exact arithmetic.
  for (int p = 0; p <= 3; ++p) {
    for (int q = 0; p + q <= 4; ++q) {
      for (const auto& y : harmonic_kernel(p, q)) {
        const Polynomial lap = sublaplacian(y);
        EXPECT_EQ(lap, y * ComplexRational(static_cast<int>(-oracle::minus_sublaplacian(p, q))));
        const Polynomial box = lap * ComplexRational(-1) +
                               apply_vector_field(VectorField::T, y) * ComplexRational::i();
        EXPECT_EQ(box, y * ComplexRational(static_cast<int>(oracle::kohn(p, q))));
      }
    }
  }
}
