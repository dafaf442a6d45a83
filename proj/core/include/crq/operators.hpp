#pragma once

#include <memory>

#include <Eigen/Core>

#include "crq/basis.hpp"

namespace crq {

/// Dense real operator in the spectral basis.
struct OperatorMatrix {
  Eigen::MatrixXd matrix;
  bool symmetric = false;

  /// max |A - A^T|
  double asymmetry() const;
  /// Largest entry coupling two different (p,q) blocks.
  double off_block_max(const ModeSet& modes) const;
};

/// Complex Hermitian operator in the real spectral basis (Kohn Laplacians).
struct HermitianOperator {
  Eigen::MatrixXcd matrix;

  double hermitian_defect() const;
};

/// Pseudohermitian operator calculus of the standard sphere.
struct Operators {
  OperatorMatrix sublaplacian;  // Delta_b (negative semidefinite)
  OperatorMatrix reeb;          // T (antisymmetric)
  HermitianOperator kohn;       // box_b = -Delta_b + iT
  HermitianOperator kohn_bar;   // boxbar_b = -Delta_b - iT
  OperatorMatrix paneitz;       // P_std = boxbar_b box_b (torsion-free)
};

/// Assemble Delta_b from the Dirichlet form
///   <-Delta_b phi, psi> = int (Z1 phi Zbar1 psi + Zbar1 phi Z1 psi) dmu_std,
/// T from its exact action, then the Kohn Laplacians and P_std. Throws
/// NumericalError if Delta_b is not symmetric within 1e-10 or P_std is not
/// symmetric positive semidefinite within 1e-9.
Operators assemble_operators(const SpectralBasis& basis);

/// Folland-Stein S^{k,2}-equivalent norm (sum (1 + nu_{p,q})^k c^2)^{1/2},
/// nu_{p,q} = 2pq + p + q. Throws std::invalid_argument for odd or negative k.
double fs_norm(const SpectralField& field, int k);

/// Grid, basis and assembled operators for one truncation.
struct SpectralSpace {
  std::shared_ptr<const QuadratureGrid> grid;
  std::shared_ptr<const SpectralBasis> basis;
  Operators ops;

  int truncation() const { return basis->truncation(); }
  Eigen::Index dimension() const { return basis->dimension(); }
  const ModeSet& modes() const { return basis->modes(); }
};

std::shared_ptr<const SpectralSpace> make_space(int truncation, double oversample = 1.0);

/// Rayleigh quotient of op on the complex harmonic Y_{p,q,m} and the eigen-residual
/// |op c - value c| / |c|, with c the coefficients of Y_{p,q,m}.
struct HarmonicEigen {
  double value = 0.0;
  double residual = 0.0;
};
HarmonicEigen harmonic_eigen(const SpectralSpace& space, const Eigen::MatrixXcd& op, int p, int q, int m);

}  // namespace crq
