#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "crq/background.hpp"

namespace crq {

enum class Integrator { exact_perp, imex_cn };

std::string_view to_string(Integrator integrator);
/// Throws std::invalid_argument for unknown names.
Integrator parse_integrator(std::string_view name);

struct FlowConfig {
  int truncation = 6;
  double oversample = 2.0;
  Integrator integrator = Integrator::exact_perp;
  /// IMEX step; for exact_perp the RK4 step of the kernel equation.
  double dt = 1e-3;
  double t_max = 10.0;
  /// Converged once grad_norm_sq <= tol_converge^2.
  double tol_converge = 1e-8;
  /// Steps between trajectory records.
  int monitor_stride = 10;
  /// Half-width of the centered energy difference taken along exact trajectories.
  double energy_probe = 1e-5;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct FlowState {
  SpectralField lambda;
  double t = 0.0;
  SpectralField lambda_ker;
  SpectralField lambda_perp;
  double last_r = 0.0;
};

/// One row of the trajectory CSV.
struct TrajectoryRecord {
  double t = 0.0;
  double energy = 0.0;
  double grad_norm_sq = 0.0;  // int (Q0_perp + 2 P0 lambda)^2 dmu0
  double volume = 0.0;        // int e^{4 lambda} dmu0
  double r = 0.0;
  double q_l2 = 0.0;          // |Q|_{L2(dmu)}, dmu = e^{4 lambda} dmu0
  double fs42 = 0.0;          // fs_norm(lambda, 4)
  double monotone_qty = 0.0;  // int e^{4 lambda} [Q - e^{-4 lambda} (Q0)_ker]^2 dmu
};

enum class RunStatus { converged, reached_t_max, numerical_failure };
std::string_view to_string(RunStatus status);

struct Trajectory {
  Integrator integrator = Integrator::exact_perp;
  double dt = 0.0;
  std::vector<TrajectoryRecord> records;
  /// lambda coefficients at each record.
  std::vector<Eigen::VectorXd> states;
  /// Centered-difference dE/dt at each record (NaN where unavailable).
  std::vector<double> energy_rate;
  RunStatus status = RunStatus::reached_t_max;
  std::string failure;
  FlowState final_state;
};

/// Shift lambda0 by the constant that enforces int e^{4 lambda0} dmu0 = V0, then split it.
FlowState init_flow(const ConformalBackground& bg, const SpectralField& lambda0, const FlowConfig& cfg);

/// r = int (Q0_perp + 2 P0 lambda) dmu / int dmu with dmu = e^{4 lambda} dmu0.
double compute_r(const ConformalBackground& bg, const SpectralField& lambda);

/// Q0_perp + 2 P0 lambda (spectral coefficients).
Eigen::VectorXd flow_gradient(const ConformalBackground& bg, const Eigen::VectorXd& lambda);

/// Evaluate every trajectory column at lambda.
TrajectoryRecord evaluate_record(const ConformalBackground& bg, double t, const Eigen::VectorXd& lambda);

/// Closed-form perp evolution d(lambda_perp)/dt = -(Q0_perp + 2 P0 lambda_perp): in the
/// (P_std, mass_w) eigenbasis each component relaxes as e^{-2 mu t} toward the
/// stationary solution of 2 P0 lambda = -Q0_perp.
class ExactPerpPropagator {
 public:
  ExactPerpPropagator(const ConformalBackground& bg, const Eigen::VectorXd& perp0);

  Eigen::VectorXd perp_at(double t) const;
  const Eigen::VectorXd& stationary() const { return stationary_; }

 private:
  const PerpSpectrum* spectrum_;
  Eigen::VectorXd stationary_;
  Eigen::VectorXd stationary_modal_;
  Eigen::VectorXd initial_modal_;
};

/// Exact perp evolution plus RK4 for d(lambda_ker)/dt = r(t) along the constant mode.
Trajectory run_exact_perp(const ConformalBackground& bg, const FlowState& state, const FlowConfig& cfg);

/// Crank-Nicolson on -2 P0 lambda, explicit midpoint on -Q0_perp + r. No volume re-projection.
class ImexStepper {
 public:
  ImexStepper(const ConformalBackground& bg, double dt);
  FlowState step(const FlowState& state) const;
  double dt() const { return dt_; }

 private:
  const ConformalBackground* bg_;
  double dt_;
  Eigen::VectorXd q0_perp_;
  Eigen::MatrixXd explicit_part_;  // mass - dt P_std
  Eigen::LLT<Eigen::MatrixXd> implicit_part_;  // mass + dt P_std
};

FlowState step_imex(const ConformalBackground& bg, const FlowState& state, double dt);
Trajectory run_imex(const ConformalBackground& bg, const FlowState& state, const FlowConfig& cfg);

/// Dispatch on cfg.integrator.
Trajectory run_flow(const ConformalBackground& bg, const FlowState& state, const FlowConfig& cfg);

struct MonitorCheck {
  std::string name;
  bool applicable = true;
  bool passed = true;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorCheck> checks;

  bool all_passed() const;
  /// nullptr when absent.
  const MonitorCheck* find(std::string_view name) const;
};

/// Energy dissipation, volume drift, monotone quantity, Folland-Stein bound, decay rate
/// (Q0 = 0 runs), frozen kernel coefficients and kernel-part vanishing. Needs >= 3 records;
/// with fewer every check is reported as not applicable.
MonitorReport monitors(const ConformalBackground& bg, const Trajectory& trajectory);

/// |P_std (lambda + w)|_{L2(dmu_std)}: vanishes exactly when e^{2(lambda + w)} has a
/// pluriharmonic exponent.
double stationary_residual(const ConformalBackground& bg, const Eigen::VectorXd& lambda);

}  // namespace crq
