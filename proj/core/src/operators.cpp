#include "crq/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "crq/error.hpp"

namespace crq {

double OperatorMatrix::asymmetry() const {
  if (matrix.size() == 0) return 0.0;
  return (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
}

double OperatorMatrix::off_block_max(const ModeSet& modes) const {
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(modes.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& mj = modes[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& mi = modes[static_cast<std::size_t>(i)];
      if (mi.p == mj.p && mi.q == mj.q) continue;
      worst = std::max(worst, std::abs(matrix(i, j)));
    }
  }
  return worst;
}

double HermitianOperator::hermitian_defect() const {
  if (matrix.size() == 0) return 0.0;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

Operators assemble_operators(const SpectralBasis& basis) {
  const Eigen::VectorXd& w = basis.grid().weights();
  const Eigen::MatrixXcd z1 =
      basis.evaluate_derived([](const Polynomial& f) { return apply_vector_field(VectorField::Z1, f); });
  const Eigen::MatrixXcd zbar1 =
      basis.evaluate_derived([](const Polynomial& f) { return apply_vector_field(VectorField::Zbar1, f); });
  const Eigen::MatrixXcd reeb =
      basis.evaluate_derived([](const Polynomial& f) { return apply_vector_field(VectorField::T, f); });

  // A_ij = int Zbar1 phi_i Z1 phi_j; the Dirichlet form is A + A^T (real part).
  const Eigen::MatrixXd weighted_re = w.asDiagonal() * z1.real();
  const Eigen::MatrixXd weighted_im = w.asDiagonal() * z1.imag();
  Eigen::MatrixXd a = zbar1.real().transpose() * weighted_re;
  a.noalias() -= zbar1.imag().transpose() * weighted_im;
  const Eigen::MatrixXd dirichlet = a + a.transpose();

  Operators ops;
  ops.sublaplacian = {-dirichlet, true};
  if (ops.sublaplacian.asymmetry() > 1e-10) {
    throw NumericalError("assemble_operators: Delta_b asymmetry " + std::to_string(ops.sublaplacian.asymmetry()));
  }
  ops.reeb = {basis.analysis() * reeb.real(), false};

  const std::complex<double> i(0.0, 1.0);
  ops.kohn.matrix = dirichlet.cast<std::complex<double>>() + i * ops.reeb.matrix.cast<std::complex<double>>();
  ops.kohn_bar.matrix = dirichlet.cast<std::complex<double>>() - i * ops.reeb.matrix.cast<std::complex<double>>();

  const Eigen::MatrixXcd product = ops.kohn_bar.matrix * ops.kohn.matrix;
  const double scale = 1.0 + product.cwiseAbs().maxCoeff();
  const double imag_defect = product.imag().cwiseAbs().maxCoeff();
  if (imag_defect > 1e-9 * scale) {
    throw NumericalError("assemble_operators: boxbar_b box_b is not real (defect " +
                         std::to_string(imag_defect) + ")");
  }
  ops.paneitz = {product.real(), true};
  if (ops.paneitz.asymmetry() > 1e-9) {
    throw NumericalError("assemble_operators: P_std asymmetry " + std::to_string(ops.paneitz.asymmetry()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ops.paneitz.matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-9) {
    throw NumericalError("assemble_operators: P_std is not positive semidefinite");
  }
  return ops;
}

double fs_norm(const SpectralField& field, int k) {
  if (k < 0 || k % 2 != 0) throw std::invalid_argument("fs_norm: k must be even and nonnegative");
  const ModeSet modes(field.truncation);
  if (static_cast<std::size_t>(field.coeffs.size()) != modes.size()) {
    throw std::invalid_argument("fs_norm: coefficient count does not match truncation");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double c = field.coeffs[static_cast<Eigen::Index>(i)];
    sum += std::pow(1.0 + sublaplacian_weight(modes[i].p, modes[i].q), k) * c * c;
  }
  return std::sqrt(sum);
}

std::shared_ptr<const SpectralSpace> make_space(int truncation, double oversample) {
  auto space = std::make_shared<SpectralSpace>();
  space->grid = std::make_shared<const QuadratureGrid>(build_grid(truncation, oversample));
  space->basis = std::make_shared<const SpectralBasis>(build_basis(truncation, space->grid));
  space->ops = assemble_operators(*space->basis);
  return space;
}

HarmonicEigen harmonic_eigen(const SpectralSpace& space, const Eigen::MatrixXcd& op, int p, int q, int m) {
  const auto& basis = *space.basis;
  const Eigen::VectorXcd c = basis.analyze(basis.grid().evaluate(basis.harmonic(p, q, m)));
  const Eigen::VectorXcd ac = op * c;
  const double norm_sq = c.squaredNorm();
  HarmonicEigen out;
  out.value = c.dot(ac).real() / norm_sq;
  out.residual = (ac - out.value * c).norm() / std::sqrt(norm_sq);
  return out;
}

}  // namespace crq
