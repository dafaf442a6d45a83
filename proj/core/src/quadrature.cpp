#include "crq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <gsl/gsl_integration.h>

namespace crq {

std::complex<double> HopfPoint::z1() const { return std::polar(std::cos(theta), phi1); }
std::complex<double> HopfPoint::z2() const { return std::polar(std::sin(theta), phi2); }

std::complex<double> QuadratureGrid::integrate(const Eigen::VectorXcd& values) const {
  return (weights_.cast<std::complex<double>>().array() * values.array()).sum();
}

QuadratureGrid build_grid(int truncation, double oversample) {
  if (truncation < 1) throw std::invalid_argument("build_grid: truncation must be >= 1");
  if (!(oversample >= 1.0)) throw std::invalid_argument("build_grid: oversample must be >= 1");

  QuadratureGrid grid;
  grid.truncation_ = truncation;
  grid.oversample_ = oversample;
  const int n_t = static_cast<int>(std::ceil(oversample * (truncation + 2) - 1e-12));
  grid.n_phi_ = static_cast<int>(std::ceil(oversample * (2 * truncation + 3) - 1e-12));
  // Trapezoid with M points is exact for |k| < M; Gauss-Legendre with n points is
  // exact in t up to degree 2n-1, and |z1|^{2a}|z2|^{2b} has t-degree a+b.
  grid.exact_degree_ = std::min(grid.n_phi_ - 1, 4 * n_t - 2);

  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n_t)),
            &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("build_grid: Gauss-Legendre table allocation failed");

  std::vector<double> t_weights(n_t);
  grid.t_.resize(n_t);
  for (int i = 0; i < n_t; ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &x, &w, table.get());
    grid.t_[i] = x;
    t_weights[i] = w;
  }
  // GSL orders points symmetrically from the centre; sort ascending for a stable layout.
  std::vector<int> order(n_t);
  for (int i = 0; i < n_t; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return grid.t_[a] < grid.t_[b]; });
  std::vector<double> t_sorted(n_t), w_sorted(n_t);
  for (int i = 0; i < n_t; ++i) {
    t_sorted[i] = grid.t_[order[i]];
    w_sorted[i] = t_weights[order[i]];
  }
  grid.t_ = std::move(t_sorted);

  const int m = grid.n_phi_;
  const double dphi = 2.0 * std::numbers::pi / m;
  grid.phi_.resize(m);
  for (int j = 0; j < m; ++j) grid.phi_[j] = dphi * j;

  grid.nodes_.reserve(static_cast<std::size_t>(n_t) * m * m);
  grid.weights_.resize(static_cast<Eigen::Index>(n_t) * m * m);
  Eigen::Index k = 0;
  for (int i = 0; i < n_t; ++i) {
    const double theta = 0.5 * std::acos(grid.t_[i]);
    const double w = 0.5 * w_sorted[i] * dphi * dphi;
    for (int j1 = 0; j1 < m; ++j1) {
      for (int j2 = 0; j2 < m; ++j2) {
        grid.nodes_.push_back({theta, grid.phi_[j1], grid.phi_[j2]});
        grid.weights_[k++] = w;
      }
    }
  }
  return grid;
}

Eigen::VectorXcd QuadratureGrid::evaluate(const Polynomial& f) const {
  const int n_t = n_theta();
  const int m = n_phi_;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size()));
  if (f.is_zero()) return out;

  // Radial factor cos^{a+c} sin^{b+d} per t-node, grouped by torus weight.
  std::map<std::array<int, 2>, std::vector<std::complex<double>>> radial;
  std::vector<double> cos_t(n_t), sin_t(n_t);
  for (int i = 0; i < n_t; ++i) {
    cos_t[i] = std::sqrt(0.5 * (1.0 + t_[i]));
    sin_t[i] = std::sqrt(0.5 * (1.0 - t_[i]));
  }
  for (const auto& [e, c] : f.terms()) {
    auto& r = radial[e.weight()];
    if (r.empty()) r.assign(n_t, 0.0);
    const std::complex<double> coeff = c.to_complex();
    const int pc = e.e[0] + e.e[2];
    const int ps = e.e[1] + e.e[3];
    for (int i = 0; i < n_t; ++i) {
      r[i] += coeff * std::pow(cos_t[i], pc) * std::pow(sin_t[i], ps);
    }
  }

  // e^{2 pi i l / m}, indexed by l mod m.
  std::vector<std::complex<double>> roots(m);
  for (int l = 0; l < m; ++l) roots[l] = std::polar(1.0, 2.0 * std::numbers::pi * l / m);
  auto phase = [&](int k, int j) {
    const long long l = (static_cast<long long>(k) * j) % m;
    return roots[static_cast<std::size_t>(l < 0 ? l + m : l)];
  };

  for (const auto& [w, r] : radial) {
    std::vector<std::complex<double>> p1(m), p2(m);
    for (int j = 0; j < m; ++j) {
      p1[j] = phase(w[0], j);
      p2[j] = phase(w[1], j);
    }
    Eigen::Index k = 0;
    for (int i = 0; i < n_t; ++i) {
      for (int j1 = 0; j1 < m; ++j1) {
        const std::complex<double> a = r[i] * p1[j1];
        for (int j2 = 0; j2 < m; ++j2) out[k++] += a * p2[j2];
      }
    }
  }
  return out;
}

}  // namespace crq
