#include "crq/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "crq/error.hpp"
#include "crq/stats.hpp"

namespace crq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFs42BlowUp = 1e8;
constexpr double kRoundoffSlack = 1e-12;

Eigen::VectorXd q0_perp(const ConformalBackground& bg) {
  return decompose(bg, bg.q0()).perp.coeffs;
}

FlowState make_state(const ConformalBackground& bg, const Eigen::VectorXd& lambda, double t, double r) {
  FlowState s;
  s.lambda = {bg.truncation(), lambda};
  s.t = t;
  auto parts = decompose(bg, s.lambda);
  s.lambda_ker = std::move(parts.ker);
  s.lambda_perp = std::move(parts.perp);
  s.last_r = r;
  return s;
}

// r and the grid quantities it needs, for a coefficient vector.
double r_of(const ConformalBackground& bg, const Eigen::VectorXd& lambda, const Eigen::VectorXd& gradient) {
  const auto& basis = *bg.space().basis;
  Eigen::MatrixXd coeffs(lambda.size(), 2);
  coeffs.col(0) = lambda;
  coeffs.col(1) = gradient;
  const Eigen::MatrixXd values = basis.synthesis() * coeffs;
  const Eigen::VectorXd weight = basis.grid().weights().cwiseProduct(bg.e4w()).cwiseProduct(
      (4.0 * values.col(0)).array().exp().matrix());
  return weight.dot(values.col(1)) / weight.sum();
}

bool status_is_finite(const TrajectoryRecord& rec) {
  return std::isfinite(rec.energy) && std::isfinite(rec.grad_norm_sq) && std::isfinite(rec.volume) &&
         std::isfinite(rec.r) && std::isfinite(rec.q_l2) && std::isfinite(rec.fs42) &&
         std::isfinite(rec.monotone_qty);
}

}  // namespace

std::string_view to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::exact_perp: return "exact_perp";
    case Integrator::imex_cn: return "imex_cn";
  }
  return "unknown";
}

Integrator parse_integrator(std::string_view name) {
  if (name == "exact_perp") return Integrator::exact_perp;
  if (name == "imex_cn") return Integrator::imex_cn;
  throw std::invalid_argument(fmt::format("unknown integrator '{}'", name));
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::reached_t_max: return "t_max";
    case RunStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  if (truncation < 1) throw std::invalid_argument("FlowConfig: truncation must be >= 1");
  if (!(oversample >= 1.0)) throw std::invalid_argument("FlowConfig: oversample must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("FlowConfig: dt must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("FlowConfig: t_max must be > 0");
  if (!(tol_converge > 0.0)) throw std::invalid_argument("FlowConfig: tol_converge must be > 0");
  if (monitor_stride < 1) throw std::invalid_argument("FlowConfig: monitor_stride must be >= 1");
  if (!(energy_probe > 0.0)) throw std::invalid_argument("FlowConfig: energy_probe must be > 0");
}

FlowState init_flow(const ConformalBackground& bg, const SpectralField& lambda0, const FlowConfig& cfg) {
  cfg.validate();
  if (lambda0.truncation != bg.truncation() || lambda0.coeffs.size() != bg.dimension()) {
    throw std::invalid_argument("init_flow: lambda0 truncation does not match background");
  }
  const auto& basis = *bg.space().basis;
  const Eigen::VectorXd lam = basis.synthesize(lambda0.coeffs);
  const double vol = basis.grid().weights().cwiseProduct(bg.e4w()).dot((4.0 * lam).array().exp().matrix());
  if (!std::isfinite(vol) || vol <= 0.0) throw NumericalError("init_flow: initial volume is not finite");
  const double shift = -0.25 * std::log(vol / bg.volume());
  Eigen::VectorXd shifted = lambda0.coeffs;
  shifted += shift * basis.constant_one();
  return make_state(bg, shifted, 0.0, 0.0);
}

Eigen::VectorXd flow_gradient(const ConformalBackground& bg, const Eigen::VectorXd& lambda) {
  return q0_perp(bg) + 2.0 * bg.paneitz0(lambda);
}

double compute_r(const ConformalBackground& bg, const SpectralField& lambda) {
  return r_of(bg, lambda.coeffs, flow_gradient(bg, lambda.coeffs));
}

TrajectoryRecord evaluate_record(const ConformalBackground& bg, double t, const Eigen::VectorXd& lambda) {
  const auto& basis = *bg.space().basis;
  const Eigen::VectorXd q0_ker = decompose(bg, bg.q0()).ker.coeffs;
  const Eigen::VectorXd p0_lambda = bg.paneitz0(lambda);
  const Eigen::VectorXd gradient = (bg.q0().coeffs - q0_ker) + 2.0 * p0_lambda;

  Eigen::MatrixXd coeffs(lambda.size(), 4);
  coeffs.col(0) = lambda;
  coeffs.col(1) = gradient;
  coeffs.col(2) = bg.q0().coeffs + 2.0 * p0_lambda;
  coeffs.col(3) = q0_ker;
  const Eigen::MatrixXd values = basis.synthesis() * coeffs;
  const Eigen::ArrayXd e4l = (4.0 * values.col(0)).array().exp();
  const Eigen::ArrayXd em4l = (-4.0 * values.col(0)).array().exp();
  const Eigen::ArrayXd dmu0 = basis.grid().weights().cwiseProduct(bg.e4w()).array();
  const Eigen::ArrayXd dmu = dmu0 * e4l;

  TrajectoryRecord rec;
  rec.t = t;
  rec.energy = energy(bg, {bg.truncation(), lambda});
  rec.grad_norm_sq = bg.inner(gradient, gradient);
  rec.volume = dmu.sum();
  rec.r = (dmu * values.col(1).array()).sum() / rec.volume;
  const Eigen::ArrayXd q = em4l * values.col(2).array();
  rec.q_l2 = std::sqrt((dmu * q.square()).sum());
  const Eigen::ArrayXd excess = q - em4l * values.col(3).array();
  rec.monotone_qty = (e4l * excess.square() * dmu).sum();
  rec.fs42 = fs_norm({bg.truncation(), lambda}, 4);
  return rec;
}

ExactPerpPropagator::ExactPerpPropagator(const ConformalBackground& bg, const Eigen::VectorXd& perp0)
    : spectrum_(&bg.perp_spectrum()) {
  const auto& v = spectrum_->vectors;
  const auto& mu = spectrum_->eigenvalues;
  if (mu.size() > 0 && !(mu.minCoeff() > 0.0)) {
    throw NumericalError("ExactPerpPropagator: Paneitz form is not positive on the perp space");
  }
  const Eigen::MatrixXd mv = bg.mass() * v;
  stationary_modal_ = -(mv.transpose() * q0_perp(bg)).cwiseQuotient(2.0 * mu);
  stationary_ = v * stationary_modal_;
  initial_modal_ = mv.transpose() * perp0 - stationary_modal_;
}

Eigen::VectorXd ExactPerpPropagator::perp_at(double t) const {
  const Eigen::VectorXd decay = (-2.0 * t * spectrum_->eigenvalues).array().exp().matrix();
  return spectrum_->vectors * (stationary_modal_ + decay.cwiseProduct(initial_modal_));
}

Trajectory run_exact_perp(const ConformalBackground& bg, const FlowState& state, const FlowConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.integrator = Integrator::exact_perp;
  traj.dt = cfg.dt;

  const ExactPerpPropagator prop(bg, state.lambda_perp.coeffs);
  const Eigen::VectorXd ker0 = state.lambda_ker.coeffs;
  const Eigen::VectorXd& one = bg.space().basis->constant_one();
  const double t0 = state.t;
  const double tol_sq = cfg.tol_converge * cfg.tol_converge;

  // r does not depend on the constant shift: numerator and denominator both carry e^{4c}.
  auto r_at = [&](double t) {
    const Eigen::VectorXd lam = prop.perp_at(t - t0) + ker0;
    return r_of(bg, lam, flow_gradient(bg, lam));
  };
  auto lambda_at = [&](double t, double c) -> Eigen::VectorXd { return prop.perp_at(t - t0) + ker0 + c * one; };

  double c = 0.0;
  double r_now = r_at(t0);
  long long step = 0;
  double t = t0;
  try {
    for (;;) {
      const bool at_end = t >= t0 + cfg.t_max - 1e-12;
      if (step % cfg.monitor_stride == 0 || at_end) {
        const Eigen::VectorXd lam = lambda_at(t, c);
        TrajectoryRecord rec = evaluate_record(bg, t, lam);
        rec.r = r_now;
        if (!status_is_finite(rec)) throw NumericalError(fmt::format("non-finite record at t = {}", t));
        const double h = cfg.energy_probe;
        const double e_plus = energy(bg, {bg.truncation(), lambda_at(t + h, c + h * r_now)});
        const double e_minus = energy(bg, {bg.truncation(), lambda_at(t - h, c - h * r_now)});
        traj.energy_rate.push_back((e_plus - e_minus) / (2.0 * h));
        traj.records.push_back(rec);
        traj.states.push_back(lam);
        if (rec.grad_norm_sq <= tol_sq) {
          traj.status = RunStatus::converged;
          break;
        }
        if (at_end) {
          traj.status = RunStatus::reached_t_max;
          break;
        }
      }
      // Classical RK4 on dc/dt = r(t); the stages reduce to Simpson weights.
      const double r_half = r_at(t + 0.5 * cfg.dt);
      const double r_next = r_at(t + cfg.dt);
      c += cfg.dt / 6.0 * (r_now + 4.0 * r_half + r_next);
      r_now = r_next;
      ++step;
      t = t0 + static_cast<double>(step) * cfg.dt;
      if (!std::isfinite(c) || !std::isfinite(r_now)) throw NumericalError(fmt::format("non-finite r at t = {}", t));
    }
    traj.final_state = make_state(bg, traj.states.back(), traj.records.back().t, traj.records.back().r);
  } catch (const NumericalError& e) {
    traj.status = RunStatus::numerical_failure;
    traj.failure = e.what();
    if (!traj.states.empty()) traj.final_state = make_state(bg, traj.states.back(), traj.records.back().t, 0.0);
  }
  return traj;
}

ImexStepper::ImexStepper(const ConformalBackground& bg, double dt) : bg_(&bg), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ImexStepper: dt must be > 0");
  q0_perp_ = q0_perp(bg);
  const Eigen::MatrixXd& p = bg.space().ops.paneitz.matrix;
  explicit_part_ = bg.mass() - dt * p;
  const Eigen::MatrixXd implicit = bg.mass() + dt * 0.5 * (p + p.transpose());
  implicit_part_.compute(implicit);
  if (implicit_part_.info() != Eigen::Success) throw NumericalError("ImexStepper: factorization failed");
}

FlowState ImexStepper::step(const FlowState& state) const {
  const ConformalBackground& bg = *bg_;
  const Eigen::VectorXd& lam = state.lambda.coeffs;
  const Eigen::VectorXd& one = bg.space().basis->constant_one();

  const Eigen::VectorXd grad = q0_perp_ + 2.0 * bg.paneitz0(lam);
  const double r0 = r_of(bg, lam, grad);
  const Eigen::VectorXd half = lam + 0.5 * dt_ * (-grad + r0 * one);
  const double r_mid = r_of(bg, half, q0_perp_ + 2.0 * bg.paneitz0(half));

  const Eigen::VectorXd forcing = -q0_perp_ + r_mid * one;
  const Eigen::VectorXd rhs = explicit_part_ * lam + dt_ * (bg.mass() * forcing);
  const Eigen::VectorXd next = implicit_part_.solve(rhs);
  if (!next.allFinite()) throw NumericalError("ImexStepper: non-finite state");
  return make_state(bg, next, state.t + dt_, r_mid);
}

FlowState step_imex(const ConformalBackground& bg, const FlowState& state, double dt) {
  return ImexStepper(bg, dt).step(state);
}

Trajectory run_imex(const ConformalBackground& bg, const FlowState& state, const FlowConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.integrator = Integrator::imex_cn;
  traj.dt = cfg.dt;
  const double tol_sq = cfg.tol_converge * cfg.tol_converge;
  const double t0 = state.t;
  try {
    const ImexStepper stepper(bg, cfg.dt);
    FlowState s = state;
    s.last_r = compute_r(bg, s.lambda);
    long long step = 0;
    for (;;) {
      const bool at_end = s.t >= t0 + cfg.t_max - 1e-12;
      if (step % cfg.monitor_stride == 0 || at_end) {
        TrajectoryRecord rec = evaluate_record(bg, s.t, s.lambda.coeffs);
        if (!status_is_finite(rec)) throw NumericalError(fmt::format("non-finite record at t = {}", s.t));
        traj.records.push_back(rec);
        traj.states.push_back(s.lambda.coeffs);
        if (rec.grad_norm_sq <= tol_sq) {
          traj.status = RunStatus::converged;
          break;
        }
        if (at_end) {
          traj.status = RunStatus::reached_t_max;
          break;
        }
      }
      s = stepper.step(s);
      ++step;
      s.t = t0 + static_cast<double>(step) * cfg.dt;
    }
    traj.final_state = s;
  } catch (const NumericalError& e) {
    traj.status = RunStatus::numerical_failure;
    traj.failure = e.what();
    if (!traj.states.empty()) traj.final_state = make_state(bg, traj.states.back(), traj.records.back().t, 0.0);
  }
  const auto n = traj.records.size();
  traj.energy_rate.assign(n, kNaN);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    traj.energy_rate[k] = (traj.records[k + 1].energy - traj.records[k - 1].energy) /
                          (traj.records[k + 1].t - traj.records[k - 1].t);
  }
  return traj;
}

Trajectory run_flow(const ConformalBackground& bg, const FlowState& state, const FlowConfig& cfg) {
  return cfg.integrator == Integrator::exact_perp ? run_exact_perp(bg, state, cfg) : run_imex(bg, state, cfg);
}

double stationary_residual(const ConformalBackground& bg, const Eigen::VectorXd& lambda) {
  return (bg.space().ops.paneitz.matrix * (lambda + bg.w().coeffs)).norm();
}

bool MonitorReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const MonitorCheck& c) { return !c.applicable || c.passed; });
}

const MonitorCheck* MonitorReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

MonitorReport monitors(const ConformalBackground& bg, const Trajectory& traj) {
  MonitorReport report;
  const auto& recs = traj.records;
  const std::size_t n = recs.size();
  const bool enough = n >= 3;
  auto add = [&](MonitorCheck c) {
    if (!enough) {
      c.applicable = false;
      c.passed = true;
      c.detail = "fewer than 3 records";
    }
    report.checks.push_back(std::move(c));
  };

  {
    // dE/dt = -int (Q0_perp + 2 P0 lambda)^2 dmu0
    MonitorCheck c{"energy_dissipation", traj.integrator == Integrator::exact_perp, true, 0.0, 1e-4, ""};
    for (std::size_t k = 0; k < n && k < traj.energy_rate.size(); ++k) {
      const double rate = traj.energy_rate[k];
      if (!std::isfinite(rate)) continue;
      const double ratio = std::abs(rate + recs[k].grad_norm_sq) / (1.0 + std::abs(recs[k].energy));
      c.measured = std::max(c.measured, ratio);
    }
    c.passed = c.measured <= c.threshold;
    if (!c.applicable) c.detail = "reported only; record-spaced differences carry O(dt^2) error";
    add(std::move(c));
  }
  {
    MonitorCheck c{"energy_decreasing", true, true, 0.0, kRoundoffSlack, ""};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double scale = 1.0 + std::abs(recs[k].energy);
      const double increase = recs[k + 1].energy - recs[k].energy;
      const bool resolvable = recs[k].grad_norm_sq * (recs[k + 1].t - recs[k].t) > kRoundoffSlack * scale;
      const bool ok = resolvable ? increase < 0.0 : increase <= kRoundoffSlack * scale;
      c.measured = std::max(c.measured, increase / scale);
      if (!ok) {
        c.passed = false;
        if (c.detail.empty()) c.detail = fmt::format("E increased at t = {}", recs[k + 1].t);
      }
    }
    add(std::move(c));
  }
  {
    MonitorCheck c{"volume_drift", true, true, 0.0, 1e-6, ""};
    for (const auto& rec : recs) c.measured = std::max(c.measured, std::abs(rec.volume - bg.volume()) / bg.volume());
    c.passed = c.measured <= c.threshold;
    add(std::move(c));
  }
  {
    MonitorCheck c{"monotone_quantity", true, true, 0.0, kRoundoffSlack, ""};
    const double scale = n > 0 ? 1.0 + recs.front().monotone_qty : 1.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double increase = (recs[k + 1].monotone_qty - recs[k].monotone_qty) / scale;
      c.measured = std::max(c.measured, increase);
    }
    c.passed = c.measured <= c.threshold;
    add(std::move(c));
  }
  {
    MonitorCheck c{"fs42_bounded", true, true, 0.0, kFs42BlowUp, ""};
    bool finite = true;
    for (const auto& rec : recs) {
      finite = finite && std::isfinite(rec.fs42);
      c.measured = std::max(c.measured, rec.fs42);
    }
    c.passed = finite && c.measured <= c.threshold;
    c.detail = fmt::format("sup fs42 = {}", c.measured);
    add(std::move(c));
  }
  {
    // Homogeneous decay of int (P0 lambda_perp)^2 dmu0 at rate >= 4 Upsilon.
    MonitorCheck c{"perp_decay_rate", false, true, kNaN, kNaN, ""};
    const double upsilon = essential_positivity(bg);
    const bool homogeneous = bg.norm(bg.q0().coeffs) <= 1e-12;
    if (homogeneous && std::isfinite(upsilon) && n >= 3) {
      std::vector<double> ts, logs;
      std::vector<double> values;
      for (std::size_t k = 0; k < n; ++k) {
        const Eigen::VectorXd perp = decompose(bg, {bg.truncation(), traj.states[k]}).perp.coeffs;
        const Eigen::VectorXd p0 = bg.paneitz0(perp);
        values.push_back(bg.inner(p0, p0));
      }
      const double top = *std::max_element(values.begin(), values.end());
      for (std::size_t k = 0; k < n; ++k) {
        if (values[k] > 1e-24 * top && values[k] > 0.0) {
          ts.push_back(recs[k].t);
          logs.push_back(std::log(values[k]));
        }
      }
      if (ts.size() >= 3) {
        c.applicable = true;
        c.measured = least_squares_slope(ts, logs);
        c.threshold = -4.0 * upsilon + 1e-6;
        c.passed = c.measured <= c.threshold && c.measured <= -3.0 * upsilon;
        c.detail = fmt::format("Upsilon = {}", upsilon);
      } else {
        c.detail = "perp part identically zero";
      }
    } else {
      c.detail = "requires Q0 = 0";
    }
    report.checks.push_back(std::move(c));
  }
  {
    // Non-constant kernel coefficients stay at their initial values.
    MonitorCheck c{"kernel_frozen", true, true, 0.0, 1e-10, ""};
    if (n > 0) {
      const auto& ker = bg.kernel_indices();
      const Eigen::VectorXd first = bg.kernel_coefficients(traj.states.front());
      for (std::size_t k = 1; k < n; ++k) {
        const Eigen::VectorXd now = bg.kernel_coefficients(traj.states[k]);
        for (std::size_t i = 0; i < ker.size(); ++i) {
          if (ker[i] == 0) continue;  // constant mode
          const auto ii = static_cast<Eigen::Index>(i);
          c.measured = std::max(c.measured, std::abs(now[ii] - first[ii]));
        }
      }
    }
    c.passed = c.measured <= c.threshold;
    add(std::move(c));
  }
  {
    MonitorCheck c{"kernel_part_vanishing", true, true, check_kernel_vanishing(bg), 1e-8, ""};
    c.passed = c.measured <= c.threshold;
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace crq
