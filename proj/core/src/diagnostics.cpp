#include "crq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crq/stats.hpp"

namespace crq {

void finalize_estimate(ConstantEstimate& estimate) {
  auto& trend = estimate.trend;
  if (trend.empty()) throw std::invalid_argument("finalize_estimate: empty trend");
  std::sort(trend.begin(), trend.end());
  estimate.value = trend.back().second;
  if (trend.size() < 2) {
    estimate.stable = false;
    return;
  }
  const double a = trend[trend.size() - 2].second;
  const double b = trend.back().second;
  estimate.stable = std::abs(a - b) <= 0.05 * std::max(std::abs(a), std::abs(b));
}

ConstantEstimate estimate_upsilon(const std::vector<const ConformalBackground*>& backgrounds) {
  ConstantEstimate est{"upsilon", 0.0, {}, false};
  for (const auto* bg : backgrounds) {
    const double v = essential_positivity(*bg);
    if (std::isnan(v)) throw std::invalid_argument("estimate_upsilon: perp space is empty (N = 1)");
    est.trend.emplace_back(bg->truncation(), v);
  }
  finalize_estimate(est);
  return est;
}

ConstantEstimate subelliptic_constant(int k, const std::vector<std::shared_ptr<const SpectralSpace>>& spaces) {
  if (k < 0 || k % 2 != 0) throw std::invalid_argument("subelliptic_constant: k must be even and >= 0");
  ConstantEstimate est{"C_" + std::to_string(k), 0.0, {}, false};
  for (const auto& space : spaces) {
    const auto& modes = space->modes();
    const auto& lap = space->ops.sublaplacian.matrix;
    const auto& pan = space->ops.paneitz.matrix;
    double best = 0.0;
    bool any = false;
    for (const auto& [p, q] : modes.bidegrees()) {
      if (p == 0 || q == 0) continue;
      const auto i = static_cast<Eigen::Index>(modes.block(p, q).first);
      const double nu = -lap(i, i);
      const double mu = pan(i, i);
      const double s = std::pow(1.0 + nu, k);
      best = std::max(best, s * std::pow(1.0 + nu, 4) / (s * mu * mu + 1.0));
      any = true;
    }
    if (any) est.trend.emplace_back(space->truncation(), best);
  }
  if (est.trend.empty()) throw std::invalid_argument("subelliptic_constant: no truncation has perp modes");
  finalize_estimate(est);
  return est;
}

ConstantEstimate subelliptic_constant(int k, const std::vector<int>& truncations, double oversample) {
  std::vector<std::shared_ptr<const SpectralSpace>> spaces;
  for (int n : truncations) spaces.push_back(make_space(n, oversample));
  return subelliptic_constant(k, spaces);
}

std::vector<double> perp_power_norms(const ConformalBackground& bg, const Trajectory& trajectory, int k) {
  if (k < 0) throw std::invalid_argument("perp_power_norms: k must be >= 0");
  std::vector<double> out;
  out.reserve(trajectory.states.size());
  for (const auto& lam : trajectory.states) {
    Eigen::VectorXd v = decompose(bg, {bg.truncation(), lam}).perp.coeffs;
    for (int j = 0; j < k; ++j) v = bg.paneitz0(v);
    out.push_back(bg.inner(v, v));
  }
  return out;
}

DecayRate decay_rate_check(const ConformalBackground& bg, const Trajectory& trajectory, int k) {
  if (trajectory.records.size() < 3) throw std::invalid_argument("decay_rate_check: needs at least 3 records");
  if (bg.norm(bg.q0().coeffs) > 1e-12) throw std::invalid_argument("decay_rate_check: requires Q0 = 0");
  DecayRate out;
  out.upsilon = essential_positivity(bg);
  const auto values = perp_power_norms(bg, trajectory, k);
  const double top = *std::max_element(values.begin(), values.end());
  if (!(top > 0.0)) {
    out.identically_zero = true;
    out.passes_sharp = out.passes_weak = true;
    return out;
  }
  // Drop records that have decayed into roundoff.
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1e-24 * top) {
      ts.push_back(trajectory.records[i].t);
      logs.push_back(std::log(values[i]));
    }
  }
  out.points = ts.size();
  if (ts.size() < 3) throw std::invalid_argument("decay_rate_check: fewer than 3 records above roundoff");
  out.slope = least_squares_slope(ts, logs);
  out.passes_sharp = out.slope <= -4.0 * out.upsilon + 1e-6;
  out.passes_weak = out.slope <= -3.0 * out.upsilon;
  return out;
}

namespace {

double max_discrepancy(const ConformalBackground& bg, const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.states.size(), b.states.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a.records[i].t - b.records[i].t) > 1e-9) {
      throw std::logic_error("cross_validate: record times do not align");
    }
    worst = std::max(worst, bg.norm(a.states[i] - b.states[i]));
  }
  return worst;
}

double discrepancy_at(const ConformalBackground& bg, const SpectralField& lambda0, double dt, double t_end,
                      int stride) {
  FlowConfig cfg;
  cfg.truncation = bg.truncation();
  cfg.dt = dt;
  cfg.t_max = t_end;
  cfg.tol_converge = 1e-300;
  cfg.monitor_stride = stride;
  const FlowState s0 = init_flow(bg, lambda0, cfg);
  cfg.integrator = Integrator::exact_perp;
  const Trajectory exact = run_flow(bg, s0, cfg);
  cfg.integrator = Integrator::imex_cn;
  const Trajectory imex = run_flow(bg, s0, cfg);
  return max_discrepancy(bg, exact, imex);
}

}  // namespace

CrossValidation cross_validate(const ConformalBackground& bg, const SpectralField& lambda0, double dt, double t_end,
                               int monitor_stride) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("cross_validate: dt and t_end must be > 0");
  CrossValidation out;
  out.error_dt = discrepancy_at(bg, lambda0, dt, t_end, monitor_stride);
  out.error_half_dt = discrepancy_at(bg, lambda0, 0.5 * dt, t_end, 2 * monitor_stride);
  out.order = (out.error_dt > 0.0 && out.error_half_dt > 0.0) ? std::log2(out.error_dt / out.error_half_dt) : 0.0;
  return out;
}

}  // namespace crq
