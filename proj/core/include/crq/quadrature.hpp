#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "crq/polynomial.hpp"

namespace crq {

/// Point of S^3 in Hopf coordinates: z1 = cos(theta) e^{i phi1}, z2 = sin(theta) e^{i phi2}.
struct HopfPoint {
  double theta;
  double phi1;
  double phi2;

  std::complex<double> z1() const;
  std::complex<double> z2() const;
};

/// Tensor-product rule for the contact volume form on S^3.
///
/// With t = cos(2 theta) the volume form of the standard contact form is
/// dmu = (1/2) dt dphi1 dphi2, so Gauss-Legendre in t times trapezoid in each
/// angle integrates every polynomial of total degree <= exact_degree exactly.
/// Nodes are stored t-major: index = (i_t * n_phi + j1) * n_phi + j2.
class QuadratureGrid {
 public:
  int truncation() const { return truncation_; }
  double oversample() const { return oversample_; }
  int n_theta() const { return static_cast<int>(t_.size()); }
  int n_phi() const { return n_phi_; }
  int exact_degree() const { return exact_degree_; }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<HopfPoint>& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Gauss-Legendre abscissae in t = cos(2 theta), ascending.
  const std::vector<double>& t_nodes() const { return t_; }
  const std::vector<double>& phi_nodes() const { return phi_; }

  std::size_t index(int i_t, int j1, int j2) const {
    return (static_cast<std::size_t>(i_t) * n_phi_ + j1) * n_phi_ + j2;
  }

  /// Sum of weights; equals the total volume 4 pi^2.
  double volume() const { return weights_.sum(); }
  double integrate(const Eigen::VectorXd& values) const { return weights_.dot(values); }
  std::complex<double> integrate(const Eigen::VectorXcd& values) const;

  /// Values of a polynomial at every node. Terms are grouped by torus weight
  /// so each group costs one radial and one phase factor per node.
  Eigen::VectorXcd evaluate(const Polynomial& f) const;

  friend QuadratureGrid build_grid(int truncation, double oversample);

 private:
  int truncation_ = 0;
  double oversample_ = 1.0;
  int n_phi_ = 0;
  int exact_degree_ = 0;
  std::vector<double> t_;
  std::vector<double> phi_;
  std::vector<HopfPoint> nodes_;
  Eigen::VectorXd weights_;
};

/// Grid for truncation degree N. Uses at least ceil(oversample (N+2)) Gauss-Legendre
/// points in t and ceil(oversample (2N+3)) trapezoid points per angle, so
/// exact_degree >= 2N + 2. Throws std::invalid_argument for N < 1 or oversample < 1.
QuadratureGrid build_grid(int truncation, double oversample = 1.0);

}  // namespace crq
