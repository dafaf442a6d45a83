#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "crq/mode.hpp"
#include "crq/polynomial.hpp"
#include "crq/quadrature.hpp"

namespace crq {

/// Real function on S^3 as coefficients in the orthonormal harmonic basis.
struct SpectralField {
  int truncation = 0;
  Eigen::VectorXd coeffs;

  static SpectralField zero(int truncation) {
    return {truncation, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ModeSet::count(truncation)))};
  }
};

/// Real function sampled at the nodes of a QuadratureGrid.
struct GridField {
  Eigen::VectorXd values;
};

/// Orthonormal real basis of the bigraded harmonics H_{p,q}, p + q <= N.
///
/// The complex harmonic Y_{p,q,m} spans the weight-(m - q, p - m) line of H_{p,q}.
/// Real basis functions pair conjugate harmonics: for p > q the (p,q,m) slot
/// holds Re Y_{p,q,m} and the (q,p,m) slot holds Im Y_{p,q,m}; for p = q the
/// slots with m > p hold Re Y, those with m < p hold Im Y_{p,p,2p-m}, and m = p
/// holds the real harmonic Y_{p,p,p}. Each (p,q) block is orthonormalized under
/// the quadrature inner product.
class SpectralBasis {
 public:
  const ModeSet& modes() const { return modes_; }
  int truncation() const { return modes_.truncation(); }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(modes_.size()); }
  const QuadratureGrid& grid() const { return *grid_; }
  const std::shared_ptr<const QuadratureGrid>& grid_ptr() const { return grid_; }

  /// nodes x modes matrix of basis values.
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  /// modes x nodes matrix: synthesis^T diag(weights).
  const Eigen::MatrixXd& analysis() const { return analysis_; }

  GridField synthesize(const SpectralField& f) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const { return synthesis_ * coeffs; }
  SpectralField analyze(const GridField& g) const;
  Eigen::VectorXd analyze(const Eigen::VectorXd& values) const { return analysis_ * values; }
  Eigen::VectorXcd analyze(const Eigen::VectorXcd& values) const;

  /// Complex harmonic Y_{p,q,m} with exact coefficients (kernel vector of the flat Laplacian).
  const Polynomial& harmonic(int p, int q, int m) const;
  /// Unnormalized real basis polynomial behind slot i.
  const Polynomial& real_polynomial(std::size_t i) const { return real_polys_[i]; }
  /// Block transform: basis_i = sum_j transform(j, i) * real_polynomial(j) within each (p,q) block.
  const Eigen::MatrixXd& block_transform(int p, int q) const;

  /// Grid values of op(basis function) for every basis function, nodes x modes.
  /// op must be linear; it is applied to the exact polynomials and the block
  /// transforms are applied afterwards.
  Eigen::MatrixXcd evaluate_derived(const std::function<Polynomial(const Polynomial&)>& op) const;

  /// Coefficients of the constant function 1.
  const Eigen::VectorXd& constant_one() const { return constant_one_; }

  friend SpectralBasis build_basis(int truncation, std::shared_ptr<const QuadratureGrid> grid);

 private:
  explicit SpectralBasis(int truncation) : modes_(truncation) {}

  ModeSet modes_;
  std::shared_ptr<const QuadratureGrid> grid_;
  std::vector<Polynomial> harmonics_;   // indexed like modes_
  std::vector<Polynomial> real_polys_;  // indexed like modes_
  std::vector<Eigen::MatrixXd> transforms_;  // per block, in bidegree order
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd analysis_;
  Eigen::VectorXd constant_one_;
};

/// Kernel of the flat Laplacian on bidegree-(p,q) monomials, one exact polynomial per
/// torus weight, ordered m = 0..p+q. Throws std::logic_error if the kernel dimension
/// is not p + q + 1.
std::vector<Polynomial> harmonic_kernel(int p, int q);

/// Requires grid->exact_degree() >= 2N. Throws NumericalError if a block Gram matrix
/// is not positive definite.
SpectralBasis build_basis(int truncation, std::shared_ptr<const QuadratureGrid> grid);

}  // namespace crq
