#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "crq/operators.hpp"
#include "oracles.hpp"

using namespace crq;

namespace {

struct OperatorsTest : ::testing::Test {
  std::shared_ptr<const SpectralSpace> space = fixture::space(6);
  const Operators& ops() const { return space->ops; }
};

Eigen::MatrixXcd complexify(const Eigen::MatrixXd& a) { return a.cast<std::complex<double>>(); }

}  // namespace

TEST_F(OperatorsTest, SymmetryFlags) {
  EXPECT_TRUE(ops().sublaplacian.symmetric);
  EXPECT_TRUE(ops().paneitz.symmetric);
  EXPECT_LE(ops().sublaplacian.asymmetry(), 1e-10);
  EXPECT_LE(ops().paneitz.asymmetry(), 1e-10);
  EXPECT_LE((ops().reeb.matrix + ops().reeb.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(ops().kohn.hermitian_defect(), 1e-10);
  EXPECT_LE(ops().kohn_bar.hermitian_defect(), 1e-10);
}

TEST_F(OperatorsTest, EigenvaluesMatchClosedForms) {
  const auto lap = complexify(-ops().sublaplacian.matrix);
  const auto pan = complexify(ops().paneitz.matrix);
  for (const auto& [p, q] : space->modes().bidegrees()) {
    for (int m = 0; m <= p + q; ++m) {
      const double s = std::max(1.0, oracle::paneitz(p, q));
      const auto a = harmonic_eigen(*space, lap, p, q, m);
      const auto b = harmonic_eigen(*space, ops().kohn.matrix, p, q, m);
      const auto c = harmonic_eigen(*space, ops().kohn_bar.matrix, p, q, m);
      const auto d = harmonic_eigen(*space, pan, p, q, m);
      EXPECT_NEAR(a.value, oracle::minus_sublaplacian(p, q), 1e-9) << p << q << m;
      EXPECT_NEAR(b.value, oracle::kohn(p, q), 1e-9) << p << q << m;
      EXPECT_NEAR(c.value, oracle::kohn_bar(p, q), 1e-9) << p << q << m;
      EXPECT_NEAR(d.value, oracle::paneitz(p, q), 1e-9 * s) << p << q << m;
      EXPECT_LE(std::max({a.residual, b.residual, c.residual}), 1e-9);
      EXPECT_LE(d.residual, 1e-9 * s);
    }
  }
}

TEST_F(OperatorsTest, DirichletFormIsPositive) {
  // <-Delta_b f, f> >= 0 with equality only for constants.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-ops().sublaplacian.matrix, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(eig.eigenvalues()[0], 0.0, 1e-10);
  EXPECT_NEAR(eig.eigenvalues()[1], 1.0, 1e-10);
}

TEST_F(OperatorsTest, PaneitzKernelIsPluriharmonic) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ops().paneitz.matrix, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const auto nker = static_cast<Eigen::Index>(space->modes().kernel_indices().size());
  EXPECT_LE(ev.head(nker).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(ev[nker], 16.0, 1e-8);
  for (const auto k : space->modes().kernel_indices()) {
    EXPECT_LE(ops().paneitz.matrix.col(static_cast<Eigen::Index>(k)).norm(), 1e-8);
  }
}

TEST_F(OperatorsTest, PaneitzEqualsSquareOfSublaplacianPlusReebSquared) {
  const Eigen::MatrixXd& l = ops().sublaplacian.matrix;
  const Eigen::MatrixXd& t = ops().reeb.matrix;
  const Eigen::MatrixXd expected = l * l + t * t;
  EXPECT_LE((ops().paneitz.matrix - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(OperatorsTest, SublaplacianIsBlockDiagonal) {
  EXPECT_LE(ops().sublaplacian.off_block_max(space->modes()), 1e-10);
  EXPECT_LE(ops().paneitz.off_block_max(space->modes()), 1e-8);
}

TEST(FsNorm, Examples) {
  const auto space = fixture::space(4);
  const int n = space->truncation();
  EXPECT_EQ(fs_norm(SpectralField::zero(n), 0), 0.0);
  EXPECT_EQ(fs_norm(SpectralField::zero(n), 4), 0.0);
  for (Eigen::Index i = 0; i < space->dimension(); ++i) {
    SpectralField e = SpectralField::zero(n);
    e.coeffs[i] = 1.0;
    EXPECT_DOUBLE_EQ(fs_norm(e, 0), 1.0);
  }
  SpectralField u = SpectralField::zero(n);
  u.coeffs[static_cast<Eigen::Index>(space->modes().index(1, 1, 1))] = 0.1;
  EXPECT_NEAR(fs_norm(u, 4), 0.1 * 25.0, 1e-14);
  EXPECT_THROW(fs_norm(u, 3), std::invalid_argument);
  EXPECT_THROW(fs_norm(u, -2), std::invalid_argument);
}

TEST(FsNorm, MatchesOperatorPowers) {
  // |f|_{S^{k,2}}^2 = <(1 - Delta_b)^k f, f>.
  const auto space = fixture::space(4);
  const Eigen::Index d = space->dimension();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) - space->ops.sublaplacian.matrix;
  const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(d, -0.5, 0.7);
  const SpectralField f{4, c};
  EXPECT_NEAR(fs_norm(f, 0), c.norm(), 1e-12);
  EXPECT_NEAR(fs_norm(f, 2), std::sqrt(c.dot(a * a * c)), 1e-9);
  EXPECT_NEAR(fs_norm(f, 4), std::sqrt(c.dot(a * a * a * a * c)), 1e-9 * fs_norm(f, 4));
}
