// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "crq/background.hpp"
#include "crq/diagnostics.hpp"
#include "crq/flow.hpp"
#include "crq/presets.hpp"
#include "oracles.hpp"

using namespace crq;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion_%d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt_line(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PresetRun {
  std::string name;
  ConformalBackground bg;
  Trajectory traj;
  MonitorReport mon;
};

FlowConfig preset_config() {
  FlowConfig c;
  c.truncation = 6;
  c.oversample = 2.0;
  c.integrator = Integrator::exact_perp;
  return c;
}

void operator_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto space = make_space(8, 1.0);
  const auto& modes = space->modes();
  const Eigen::MatrixXcd pan = space->ops.paneitz.matrix.cast<std::complex<double>>();
  double worst_kohn = 0.0, worst_pan = 0.0;
  for (const auto& [p, q] : modes.bidegrees()) {
    for (int m = 0; m <= p + q; ++m) {
      const double kohn = oracle::kohn(p, q);
      const auto ek = harmonic_eigen(*space, space->ops.kohn.matrix, p, q, m);
      worst_kohn = std::max({worst_kohn, std::abs(ek.value - kohn) / std::max(1.0, kohn), ek.residual / std::max(1.0, kohn)});
      const double paneitz = oracle::paneitz(p, q);
      const auto ep = harmonic_eigen(*space, pan, p, q, m);
      worst_pan = std::max({worst_pan, std::abs(ep.value - paneitz) / std::max(1.0, paneitz),
                            ep.residual / std::max(1.0, paneitz)});
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(space->ops.paneitz.matrix, Eigen::EigenvaluesOnly);
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) zeros += std::abs(eig.eigenvalues()[i]) <= 1e-8;
  double kernel_image = 0.0;
  std::size_t pluriharmonic = 0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& mode = modes[i];
    if (mode.p != 0 && mode.q != 0) continue;
    ++pluriharmonic;
    kernel_image = std::max(kernel_image, space->ops.paneitz.matrix.col(static_cast<Eigen::Index>(i)).norm());
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst_kohn <= 1e-8 && worst_pan <= 1e-8 && zeros == pluriharmonic && kernel_image <= 1e-8 &&
                  elapsed <= 10.0;
  report(1, "operator_oracle", ok,
         fmt_line("N=8 kohn_rel_err=%.3g paneitz_rel_err=%.3g zero_eigs=%zu pluriharmonic=%zu kernel_image=%.3g "
                  "time=%.2fs",
                  worst_kohn, worst_pan, zeros, pluriharmonic, kernel_image, elapsed));
}

void kernel_vanishing() {
  const auto space = make_space(8, 1.0);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto bg = make_background(space, random_field(*space, seed, 4, 0.5));
    worst = std::max(worst, check_kernel_vanishing(bg));
  }
  report(2, "kernel_vanishing", worst <= 1e-8, fmt_line("20 backgrounds degree=4 amplitude=0.5 max_residual=%.3g", worst));
}

void gradient_identity(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"sphere-mode11", "conformal-c03"}) {
    const auto& run = runs.at(name);
    double worst = 0.0;
    for (std::size_t k = 0; k < run.traj.records.size(); ++k) {
      const auto& rec = run.traj.records[k];
      worst = std::max(worst, std::abs(run.traj.energy_rate[k] + rec.grad_norm_sq) / (1.0 + std::abs(rec.energy)));
    }
    const auto* dec = run.mon.find("energy_decreasing");
    const bool decreasing = dec && dec->applicable && dec->passed;
    ok = ok && worst <= 1e-4 && decreasing;
    detail += fmt_line("%s max_rel_defect=%.3g decreasing=%s; ", name, worst, decreasing ? "yes" : "no");
  }
  report(3, "gradient_flow_identity", ok, detail);
}

void volume_invariance(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, run] : runs) {
    double drift = 0.0;
    for (const auto& rec : run.traj.records) drift = std::max(drift, std::abs(rec.volume - run.bg.volume()) / run.bg.volume());
    ok = ok && drift <= 1e-6;
    detail += fmt_line("%s drift=%.3g; ", name.c_str(), drift);
  }
  report(4, "volume_invariance", ok, detail);
}

void exact_decay(const std::map<std::string, PresetRun>& runs) {
  const auto& run = runs.at("sphere-mode11");
  const auto& space = run.bg.space();
  const Eigen::VectorXd u = mode_field(space, mode11(), 1.0).coeffs;
  double err = 0.0;
  for (std::size_t k = 0; k < run.traj.records.size(); ++k) {
    const auto perp = decompose(run.bg, {space.truncation(), run.traj.states[k]}).perp.coeffs;
    err = std::max(err, (perp - 0.1 * std::exp(-32.0 * run.traj.records[k].t) * u).cwiseAbs().maxCoeff());
  }
  const auto lam0 = make_preset("sphere-mode11", space).lambda0;
  const auto cv = cross_validate(run.bg, lam0, 1e-3, 0.2);
  const double upsilon = essential_positivity(run.bg);
  const bool ok = err <= 1e-9 && std::abs(cv.order - 2.0) <= 0.2 && std::abs(upsilon - 16.0) <= 1e-8;
  report(5, "exact_decay", ok,
         fmt_line("exact_max_err=%.3g imex_err(dt=1e-3)=%.3g imex_err(dt=5e-4)=%.3g order=%.4f upsilon=%.12g", err,
                  cv.error_dt, cv.error_half_dt, cv.order, upsilon));
}

void convergence(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, run] : runs) {
    const auto& last = run.traj.records.back();
    const double res = stationary_residual(run.bg, run.traj.states.back());
    const auto* mono = run.mon.find("monotone_quantity");
    const bool mono_ok = mono && (!mono->applicable || mono->passed);
    const bool conv = run.traj.status == RunStatus::converged;
    ok = ok && conv && last.q_l2 <= 1e-6 && res <= 1e-6 && mono_ok;
    detail += fmt_line("%s status=%s t=%.3g q_l2=%.3g stationary_residual=%.3g monotone=%s; ", name.c_str(),
                       std::string(to_string(run.traj.status)).c_str(), last.t, last.q_l2, res,
                       mono_ok ? "ok" : "violated");
  }
  report(6, "convergence_and_limit", ok, detail);
}

void subelliptic_trend() {
  const std::vector<std::shared_ptr<const SpectralSpace>> spaces{make_space(10, 1.0), make_space(12, 1.0)};
  bool ok = true;
  std::string detail;
  for (int k : {0, 2}) {
    const auto est = subelliptic_constant(k, spaces);
    const double a = est.trend.front().second, b = est.trend.back().second;
    const double variation = std::abs(b - a) / std::abs(b);
    ok = ok && variation <= 0.05;
    detail += fmt_line("C_%d N=10:%.8g N=12:%.8g variation=%.3g; ", k, a, b, variation);
  }
  report(7, "subelliptic_trend", ok, detail);
}

void apriori_bound(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, run] : runs) {
    double sup = 0.0;
    for (const auto& rec : run.traj.records) sup = std::max(sup, rec.fs42);
    ok = ok && std::isfinite(sup) && sup <= 1e8;
    detail += fmt_line("%s sup_fs42=%.6g; ", name.c_str(), sup);
  }

  const auto space = make_space(4, 2.0);
  FlowConfig cfg;
  cfg.truncation = 4;
  cfg.dt = 0.01;
  cfg.t_max = 1.0;
  int blowups = 0;
  double sweep_sup = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    cfg.integrator = seed % 2 ? Integrator::exact_perp : Integrator::imex_cn;
    const auto bg = make_background(space, random_field(*space, seed, 2, 0.5));
    const auto traj = run_flow(bg, init_flow(bg, random_field(*space, seed + 1000, 2, 0.5), cfg), cfg);
    double sup = 0.0;
    for (const auto& rec : traj.records) sup = std::max(sup, rec.fs42);
    if (traj.status == RunStatus::numerical_failure || !std::isfinite(sup) || sup > 1e8) ++blowups;
    else sweep_sup = std::max(sweep_sup, sup);
  }
  ok = ok && blowups == 0;
  detail += fmt_line("sweep runs=100 N=4 dt=0.01 blowups=%d sup_fs42=%.6g", blowups, sweep_sup);
  report(8, "apriori_bound", ok, detail);
}

}  // namespace

int main() {
  operator_oracle();
  kernel_vanishing();

  const FlowConfig cfg = preset_config();
  const auto space = make_space(cfg.truncation, cfg.oversample);
  std::map<std::string, PresetRun> runs;
  for (const auto& name : preset_names()) {
    const auto preset = make_preset(name, *space);
    auto bg = make_background(space, preset.w);
    auto traj = run_flow(bg, init_flow(bg, preset.lambda0, cfg), cfg);
    auto mon = monitors(bg, traj);
    runs.emplace(name, PresetRun{name, std::move(bg), std::move(traj), std::move(mon)});
  }

  gradient_identity(runs);
  volume_invariance(runs);
  exact_decay(runs);
  convergence(runs);
  subelliptic_trend();
  apriori_bound(runs);

  std::printf("acceptance: %s\n", failures == 0 ? "all criteria passed" : "FAILED");
  return failures == 0 ? 0 : 1;
}
