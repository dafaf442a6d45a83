#include "crq/basis.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "crq/error.hpp"

namespace crq {

namespace {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Null space of a rational matrix via reduced row echelon form. One basis vector
// per free column, with that column set to 1.
std::vector<std::vector<Rational>> null_space(RationalMatrix a, std::size_t cols) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) v[pivot_cols[i]] = -a[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

Exponent bidegree_monomial(int p, int q, int a, int c) {
  Exponent e;
  e.e = {a, p - a, c, q - c};
  return e;
}

}  // namespace

std::vector<Polynomial> harmonic_kernel(int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("harmonic_kernel: negative bidegree");
  std::vector<Polynomial> out;
  out.reserve(static_cast<std::size_t>(p + q + 1));
  for (int k1 = -q; k1 <= p; ++k1) {
    // Monomials z1^a z2^{p-a} zbar1^c zbar2^{q-c} with a - c = k1.
    std::vector<Exponent> sources;
    for (int a = std::max(0, k1); a <= std::min(p, q + k1); ++a) {
      sources.push_back(bidegree_monomial(p, q, a, a - k1));
    }
    std::map<Exponent, std::size_t> target_row;
    std::vector<Polynomial> images;
    for (const auto& e : sources) {
      images.push_back(flat_laplacian(Polynomial::monomial(e)));
      for (const auto& [t, c] : images.back().terms()) target_row.try_emplace(t, target_row.size());
    }
    RationalMatrix mat(target_row.size(), std::vector<Rational>(sources.size(), Rational(0)));
    for (std::size_t j = 0; j < sources.size(); ++j) {
      for (const auto& [t, c] : images[j].terms()) mat[target_row.at(t)][j] = c.re;
    }
    const auto kernel = null_space(std::move(mat), sources.size());
    if (kernel.size() != 1) {
      throw std::logic_error("harmonic_kernel: weight class of H_{" + std::to_string(p) + "," +
                             std::to_string(q) + "} has kernel dimension " +
                             std::to_string(kernel.size()));
    }
    Polynomial y;
    for (std::size_t j = 0; j < sources.size(); ++j) y.add_term(sources[j], ComplexRational(kernel[0][j]));
    if (!flat_laplacian(y).is_zero()) throw std::logic_error("harmonic_kernel: kernel vector is not harmonic");
    out.push_back(std::move(y));
  }
  if (out.size() != static_cast<std::size_t>(p + q + 1)) {
    throw std::logic_error("harmonic_kernel: wrong kernel dimension");
  }
  return out;
}

GridField SpectralBasis::synthesize(const SpectralField& f) const {
  return {synthesis_ * f.coeffs};
}

SpectralField SpectralBasis::analyze(const GridField& g) const {
  return {truncation(), analysis_ * g.values};
}

Eigen::VectorXcd SpectralBasis::analyze(const Eigen::VectorXcd& values) const {
  return analysis_.cast<std::complex<double>>() * values;
}

const Polynomial& SpectralBasis::harmonic(int p, int q, int m) const {
  return harmonics_[modes_.index(p, q, m)];
}

const Eigen::MatrixXd& SpectralBasis::block_transform(int p, int q) const {
  const auto& bd = modes_.bidegrees();
  const auto it = std::find(bd.begin(), bd.end(), std::pair<int, int>{p, q});
  if (it == bd.end()) throw std::out_of_range("block_transform: no such block");
  return transforms_[static_cast<std::size_t>(it - bd.begin())];
}

Eigen::MatrixXcd SpectralBasis::evaluate_derived(
    const std::function<Polynomial(const Polynomial&)>& op) const {
  const auto n_nodes = static_cast<Eigen::Index>(grid_->size());
  Eigen::MatrixXcd out(n_nodes, dimension());
  const auto& bd = modes_.bidegrees();
  for (std::size_t b = 0; b < bd.size(); ++b) {
    const auto [begin, end] = modes_.block(bd[b].first, bd[b].second);
    const auto bs = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXcd raw(n_nodes, bs);
    for (Eigen::Index j = 0; j < bs; ++j) raw.col(j) = grid_->evaluate(op(real_polys_[begin + j]));
    out.middleCols(static_cast<Eigen::Index>(begin), bs) = raw * transforms_[b].cast<std::complex<double>>();
  }
  return out;
}

SpectralBasis build_basis(int truncation, std::shared_ptr<const QuadratureGrid> grid) {
  if (!grid) throw std::invalid_argument("build_basis: null grid");
  if (truncation < 0) throw std::invalid_argument("build_basis: negative truncation");
  if (grid->exact_degree() < 2 * truncation) {
    throw std::invalid_argument("build_basis: grid exact degree " + std::to_string(grid->exact_degree()) +
                                " < 2N = " + std::to_string(2 * truncation));
  }
  SpectralBasis basis(truncation);
  basis.grid_ = std::move(grid);
  const ModeSet& modes = basis.modes_;
  const auto n = modes.size();

  // Complex harmonics per block.
  basis.harmonics_.resize(n);
  for (const auto& [p, q] : modes.bidegrees()) {
    auto ys = harmonic_kernel(p, q);
    const auto [begin, end] = modes.block(p, q);
    for (std::size_t j = 0; j < ys.size(); ++j) basis.harmonics_[begin + j] = std::move(ys[j]);
  }

  // Real combinations pairing H_{p,q} with its conjugate H_{q,p}.
  const ComplexRational half(Rational(1, 2));
  const ComplexRational minus_half_i(Rational(0), Rational(-1, 2));  // 1/(2i)
  auto re_part = [&](const Polynomial& y) { return (y + y.conj()) * half; };
  auto im_part = [&](const Polynomial& y) { return (y - y.conj()) * minus_half_i; };
  basis.real_polys_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& md = modes[i];
    if (md.p > md.q) {
      basis.real_polys_[i] = re_part(basis.harmonic(md.p, md.q, md.m));
    } else if (md.p < md.q) {
      basis.real_polys_[i] = im_part(basis.harmonic(md.q, md.p, md.m));
    } else if (md.m >= md.p) {
      basis.real_polys_[i] = re_part(basis.harmonic(md.p, md.p, md.m));
    } else {
      basis.real_polys_[i] = im_part(basis.harmonic(md.p, md.p, 2 * md.p - md.m));
    }
    if (basis.real_polys_[i].is_zero()) throw std::logic_error("build_basis: vanishing real basis polynomial");
  }

  // Orthonormalize each block under the quadrature inner product.
  const QuadratureGrid& g = *basis.grid_;
  const auto n_nodes = static_cast<Eigen::Index>(g.size());
  const Eigen::VectorXd& w = g.weights();
  basis.synthesis_.resize(n_nodes, static_cast<Eigen::Index>(n));
  for (const auto& [p, q] : modes.bidegrees()) {
    const auto [begin, end] = modes.block(p, q);
    const auto bs = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd raw(n_nodes, bs);
    for (Eigen::Index j = 0; j < bs; ++j) {
      const Eigen::VectorXcd v = g.evaluate(basis.real_polys_[begin + j]);
      if (v.imag().cwiseAbs().maxCoeff() > 1e-10 * (1.0 + v.real().cwiseAbs().maxCoeff())) {
        throw std::logic_error("build_basis: real basis polynomial has imaginary values");
      }
      raw.col(j) = v.real();
    }
    const Eigen::MatrixXd gram = raw.transpose() * w.asDiagonal() * raw;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("build_basis: Gram matrix of block (" + std::to_string(p) + "," +
                           std::to_string(q) + ") is not positive definite");
    }
    // basis = raw * L^{-T}
    const Eigen::MatrixXd transform = llt.matrixU().solve(Eigen::MatrixXd::Identity(bs, bs));
    basis.synthesis_.middleCols(static_cast<Eigen::Index>(begin), bs) = raw * transform;
    basis.transforms_.push_back(transform);
  }
  basis.analysis_ = basis.synthesis_.transpose() * w.asDiagonal();
  basis.constant_one_ = basis.analysis_ * Eigen::VectorXd::Ones(n_nodes);
  return basis;
}

}  // namespace crq
