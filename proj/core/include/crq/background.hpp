#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "crq/operators.hpp"

namespace crq {

/// Generalized eigenpairs of (P_std, mass_w) on the dmu0-orthogonal complement of ker P0.
struct PerpSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd vectors;      // columns: full coefficient vectors, mass_w-orthonormal
};

/// Contact form theta0 = e^{2w} theta_std together with everything the flow needs
/// about it: weighted mass matrix, kernel projector, Q0 and the perp spectrum.
/// Immutable after construction.
///
/// Projections back onto the truncated space are taken in the dmu0 inner product,
/// so P0 = mass_w^{-1} P_std is exactly self-adjoint in dmu0.
class ConformalBackground {
 public:
  const SpectralSpace& space() const { return *space_; }
  const std::shared_ptr<const SpectralSpace>& space_ptr() const { return space_; }
  int truncation() const { return space_->truncation(); }
  Eigen::Index dimension() const { return space_->dimension(); }

  const SpectralField& w() const { return w_; }
  const Eigen::VectorXd& e4w() const { return e4w_; }
  const Eigen::VectorXd& em4w() const { return em4w_; }
  /// M_ij = int phi_i phi_j e^{4w} dmu_std
  const Eigen::MatrixXd& mass() const { return mass_; }
  const std::vector<std::size_t>& kernel_indices() const { return space_->modes().kernel_indices(); }
  const std::vector<std::size_t>& perp_indices() const { return space_->modes().perp_indices(); }
  const Eigen::MatrixXd& kernel_gram() const { return kernel_gram_; }
  const SpectralField& q0() const { return q0_; }
  /// V0 = int dmu0
  double volume() const { return volume_; }
  const PerpSpectrum& perp_spectrum() const { return perp_; }

  /// dmu0 inner product and norm of coefficient vectors.
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return a.dot(mass_ * b); }
  double norm(const Eigen::VectorXd& a) const;
  Eigen::VectorXd solve_mass(const Eigen::VectorXd& rhs) const { return mass_llt_.solve(rhs); }
  /// dmu0-orthogonal projection of grid values onto the truncated space.
  Eigen::VectorXd weighted_analyze(const Eigen::VectorXd& grid_values) const;
  /// P0 phi = mass_w^{-1} P_std phi, spectral route.
  Eigen::VectorXd paneitz0(const Eigen::VectorXd& phi) const;
  /// Coefficients c of the kernel part sum_k c_k e_k of f.
  Eigen::VectorXd kernel_coefficients(const Eigen::VectorXd& f) const;

  friend ConformalBackground make_background(std::shared_ptr<const SpectralSpace> space,
                                             const SpectralField& w);

 private:
  std::shared_ptr<const SpectralSpace> space_;
  SpectralField w_;
  Eigen::VectorXd e4w_;
  Eigen::VectorXd em4w_;
  Eigen::MatrixXd mass_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
  Eigen::MatrixXd kernel_gram_;
  Eigen::LLT<Eigen::MatrixXd> kernel_llt_;
  SpectralField q0_;
  double volume_ = 0.0;
  PerpSpectrum perp_;
};

/// Q0 = analysis of e^{-4w} (2 P_std w), the transformation law from theta_std (Q_std = 0).
/// Throws NumericalError when mass_w or the perp eigenproblem cannot be factorized.
ConformalBackground make_background(std::shared_ptr<const SpectralSpace> space, const SpectralField& w);

/// P0 phi = analysis of e^{-4w} P_std phi.
SpectralField paneitz_apply(const ConformalBackground& bg, const SpectralField& phi);

struct Decomposition {
  SpectralField ker;
  SpectralField perp;
};

/// dmu0-orthogonal split f = f_ker + f_perp against span{modes with p = 0 or q = 0}.
Decomposition decompose(const ConformalBackground& bg, const SpectralField& f);

/// Q of e^{2 lambda} theta0 at the grid nodes: e^{-4 lambda} (Q0 + 2 P0 lambda).
GridField q_of(const ConformalBackground& bg, const SpectralField& lambda);

/// E(lambda) = <P0 lambda, lambda>_{dmu0} + <Q0, lambda>_{dmu0}.
double energy(const ConformalBackground& bg, const SpectralField& lambda);

/// max_k |<Q0, k>_{dmu0}| / (|Q0| |k| + eps) over the kernel basis, by direct quadrature.
/// Returns 0 when |Q0| <= 1e-12 (1 + |2 P_std w|).
double check_kernel_vanishing(const ConformalBackground& bg);

/// Smallest generalized eigenvalue of (P_std, mass_w) on the perp space; NaN when the
/// perp space is empty (N = 1).
double essential_positivity(const ConformalBackground& bg);

/// Amplitude above which random backgrounds are rejected: keeps e^{4w} in [e^-4, e^4].
inline constexpr double kMaxRandomAmplitude = 1.0;

/// Seeded random field: uniform coefficients on modes with 1 <= p+q <= degree, scaled so
/// that max over grid nodes of |f| equals amplitude.
SpectralField random_field(const SpectralSpace& space, std::uint64_t seed, int degree, double amplitude);

/// amplitude times the normalized basis function of the given mode.
SpectralField mode_field(const SpectralSpace& space, const HarmonicMode& mode, double amplitude);

/// The normalized (1,1) mode proportional to |z1|^2 - |z2|^2.
inline HarmonicMode mode11() { return {1, 1, 1}; }

}  // namespace crq
