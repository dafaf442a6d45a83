#include "crq/background.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "crq/error.hpp"

namespace crq {

namespace {

Eigen::MatrixXd select(const Eigen::MatrixXd& a, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

void check_field(const ConformalBackground& bg, const SpectralField& f, const char* who) {
  if (f.truncation != bg.truncation() || f.coeffs.size() != bg.dimension()) {
    throw std::invalid_argument(std::string(who) + ": field truncation does not match background");
  }
}

}  // namespace

double ConformalBackground::norm(const Eigen::VectorXd& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

Eigen::VectorXd ConformalBackground::weighted_analyze(const Eigen::VectorXd& grid_values) const {
  const auto& basis = *space_->basis;
  return mass_llt_.solve(basis.analysis() * e4w_.cwiseProduct(grid_values));
}

Eigen::VectorXd ConformalBackground::paneitz0(const Eigen::VectorXd& phi) const {
  return mass_llt_.solve(space_->ops.paneitz.matrix * phi);
}

Eigen::VectorXd ConformalBackground::kernel_coefficients(const Eigen::VectorXd& f) const {
  const auto& ker = kernel_indices();
  const Eigen::VectorXd mf = mass_ * f;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(ker.size()));
  for (std::size_t i = 0; i < ker.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = mf[static_cast<Eigen::Index>(ker[i])];
  return kernel_llt_.solve(rhs);
}

ConformalBackground make_background(std::shared_ptr<const SpectralSpace> space, const SpectralField& w) {
  if (!space) throw std::invalid_argument("make_background: null space");
  ConformalBackground bg;
  bg.space_ = std::move(space);
  check_field(bg, w, "make_background");
  bg.w_ = w;

  const auto& basis = *bg.space_->basis;
  const auto& grid = basis.grid();
  const Eigen::VectorXd w_grid = basis.synthesize(w.coeffs);
  bg.e4w_ = (4.0 * w_grid).array().exp().matrix();
  bg.em4w_ = (-4.0 * w_grid).array().exp().matrix();
  if (!bg.e4w_.allFinite() || !bg.em4w_.allFinite()) throw NumericalError("make_background: e^{4w} overflow");

  const Eigen::VectorXd weight = grid.weights().cwiseProduct(bg.e4w_);
  bg.volume_ = weight.sum();
  const Eigen::MatrixXd scaled = weight.cwiseSqrt().asDiagonal() * basis.synthesis();
  const Eigen::Index n = bg.dimension();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  lower.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  bg.mass_ = lower.selfadjointView<Eigen::Lower>();
  bg.mass_llt_.compute(bg.mass_);
  if (bg.mass_llt_.info() != Eigen::Success) {
    throw NumericalError("make_background: mass_w is not positive definite; raise truncation or oversample");
  }

  const auto& ker = bg.kernel_indices();
  const auto& perp = bg.perp_indices();
  bg.kernel_gram_ = select(bg.mass_, ker, ker);
  bg.kernel_llt_.compute(bg.kernel_gram_);
  if (bg.kernel_llt_.info() != Eigen::Success) throw NumericalError("make_background: kernel Gram matrix is singular");

  // Q0 through the transformation law with Q_std = 0.
  const Eigen::VectorXd pw = bg.space_->ops.paneitz.matrix * w.coeffs;
  const Eigen::VectorXd g = bg.em4w_.cwiseProduct(basis.synthesize(2.0 * pw));
  bg.q0_ = {w.truncation, bg.weighted_analyze(g)};

  // Perp spectrum: P_NN y = mu S y with S the Schur complement of the kernel block,
  // lifted to v = E_N y - E_K M_KK^{-1} M_KN y.
  if (!perp.empty()) {
    const Eigen::MatrixXd m_kn = select(bg.mass_, ker, perp);
    const Eigen::MatrixXd x = bg.kernel_llt_.solve(m_kn);
    Eigen::MatrixXd schur = select(bg.mass_, perp, perp) - m_kn.transpose() * x;
    schur = 0.5 * (schur + schur.transpose()).eval();
    Eigen::MatrixXd p_nn = select(bg.space_->ops.paneitz.matrix, perp, perp);
    p_nn = 0.5 * (p_nn + p_nn.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(p_nn, schur);
    if (ges.info() != Eigen::Success) throw NumericalError("make_background: perp eigenproblem failed");
    const Eigen::MatrixXd& y = ges.eigenvectors();
    bg.perp_.eigenvalues = ges.eigenvalues();
    bg.perp_.vectors = Eigen::MatrixXd::Zero(n, y.cols());
    const Eigen::MatrixXd xy = x * y;
    for (std::size_t i = 0; i < perp.size(); ++i) bg.perp_.vectors.row(static_cast<Eigen::Index>(perp[i])) = y.row(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < ker.size(); ++i) bg.perp_.vectors.row(static_cast<Eigen::Index>(ker[i])) = -xy.row(static_cast<Eigen::Index>(i));
  }
  return bg;
}

SpectralField paneitz_apply(const ConformalBackground& bg, const SpectralField& phi) {
  check_field(bg, phi, "paneitz_apply");
  const auto& basis = bg.space().basis;
  const Eigen::VectorXd g = bg.em4w().cwiseProduct(basis->synthesize(bg.space().ops.paneitz.matrix * phi.coeffs));
  return {phi.truncation, bg.weighted_analyze(g)};
}

Decomposition decompose(const ConformalBackground& bg, const SpectralField& f) {
  check_field(bg, f, "decompose");
  const Eigen::VectorXd c = bg.kernel_coefficients(f.coeffs);
  SpectralField ker = SpectralField::zero(f.truncation);
  const auto& idx = bg.kernel_indices();
  for (std::size_t i = 0; i < idx.size(); ++i) ker.coeffs[static_cast<Eigen::Index>(idx[i])] = c[static_cast<Eigen::Index>(i)];
  SpectralField perp{f.truncation, f.coeffs - ker.coeffs};
  return {std::move(ker), std::move(perp)};
}

GridField q_of(const ConformalBackground& bg, const SpectralField& lambda) {
  check_field(bg, lambda, "q_of");
  const auto& basis = *bg.space().basis;
  const Eigen::VectorXd coeffs = bg.q0().coeffs + 2.0 * bg.paneitz0(lambda.coeffs);
  const Eigen::VectorXd lam = basis.synthesize(lambda.coeffs);
  return {(-4.0 * lam).array().exp().matrix().cwiseProduct(basis.synthesize(coeffs))};
}

double energy(const ConformalBackground& bg, const SpectralField& lambda) {
  check_field(bg, lambda, "energy");
  const Eigen::VectorXd& x = lambda.coeffs;
  return bg.inner(bg.paneitz0(x), x) + bg.inner(bg.q0().coeffs, x);
}

double check_kernel_vanishing(const ConformalBackground& bg) {
  const auto& basis = *bg.space().basis;
  const Eigen::VectorXd weight = basis.grid().weights().cwiseProduct(bg.e4w());
  const Eigen::VectorXd q = basis.synthesize(bg.q0().coeffs);
  const double q_norm = std::sqrt(weight.dot(q.cwiseAbs2()));
  // Q0 at roundoff level of its source 2 P_std w: nothing to test.
  const double source = 2.0 * (bg.space().ops.paneitz.matrix * bg.w().coeffs).norm();
  if (q_norm <= 1e-12 * (1.0 + source)) return 0.0;
  const Eigen::VectorXd wq = weight.cwiseProduct(q);
  constexpr double eps = std::numeric_limits<double>::min();
  double worst = 0.0;
  for (const std::size_t k : bg.kernel_indices()) {
    const auto col = basis.synthesis().col(static_cast<Eigen::Index>(k));
    const double k_norm = std::sqrt(weight.dot(col.cwiseAbs2()));
    worst = std::max(worst, std::abs(wq.dot(col)) / (q_norm * k_norm + eps));
  }
  return worst;
}

double essential_positivity(const ConformalBackground& bg) {
  const auto& ev = bg.perp_spectrum().eigenvalues;
  return ev.size() == 0 ? std::numeric_limits<double>::quiet_NaN() : ev.minCoeff();
}

SpectralField random_field(const SpectralSpace& space, std::uint64_t seed, int degree, double amplitude) {
  const int n = space.truncation();
  if (degree < 1 || degree > n) throw std::invalid_argument("random_field: degree must lie in [1, N]");
  if (!(amplitude >= 0.0) || amplitude > kMaxRandomAmplitude) {
    throw std::invalid_argument("random_field: amplitude must lie in [0, " + std::to_string(kMaxRandomAmplitude) + "]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  SpectralField f = SpectralField::zero(n);
  const auto& modes = space.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const int d = modes[i].degree();
    if (d >= 1 && d <= degree) f.coeffs[static_cast<Eigen::Index>(i)] = uniform(rng);
  }
  const double sup = space.basis->synthesize(f.coeffs).cwiseAbs().maxCoeff();
  if (sup > 0.0) f.coeffs *= amplitude / sup;
  return f;
}

SpectralField mode_field(const SpectralSpace& space, const HarmonicMode& mode, double amplitude) {
  SpectralField f = SpectralField::zero(space.truncation());
  f.coeffs[static_cast<Eigen::Index>(space.modes().index(mode))] = amplitude;
  return f;
}

}  // namespace crq
