#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "crq/background.hpp"
#include "crq/flow.hpp"

namespace crq {

/// A discrete constant tracked across truncations.
struct ConstantEstimate {
  std::string name;
  double value = 0.0;  // value at the largest truncation
  std::vector<std::pair<int, double>> trend;
  /// Relative variation between the two largest truncations is at most 5%.
  bool stable = false;
};

/// Fills value and stable from trend (sorted by N).
void finalize_estimate(ConstantEstimate& estimate);

/// Smallest perp eigenvalue of (P_std, mass_w) for each background. Throws
/// std::invalid_argument when a background has an empty perp space.
ConstantEstimate estimate_upsilon(const std::vector<const ConformalBackground*>& backgrounds);

/// Per truncation, max over perp bidegrees of
///   (1 + nu)^{k+4} / ((1 + nu)^k mu^2 + 1)
/// with nu and mu the Rayleigh quotients of -Delta_b and P_std on the first basis
/// function of each block, read from the assembled operators.
ConstantEstimate subelliptic_constant(int k, const std::vector<std::shared_ptr<const SpectralSpace>>& spaces);
ConstantEstimate subelliptic_constant(int k, const std::vector<int>& truncations, double oversample = 1.0);

struct DecayRate {
  double slope = 0.0;        // least-squares slope of log int (P0^k lambda_perp)^2 dmu0
  double upsilon = 0.0;
  bool identically_zero = false;
  bool passes_sharp = false;   // slope <= -4 Upsilon + 1e-6
  bool passes_weak = false;    // slope <= -3 Upsilon
  std::size_t points = 0;
};

/// int (P0^k lambda_perp)^2 dmu0 at each record.
std::vector<double> perp_power_norms(const ConformalBackground& bg, const Trajectory& trajectory, int k);

/// Requires Q0 = 0 and at least 3 records; throws std::invalid_argument otherwise.
DecayRate decay_rate_check(const ConformalBackground& bg, const Trajectory& trajectory, int k);

struct CrossValidation {
  double error_dt = 0.0;       // max_t |lambda_exact - lambda_imex|_{L2(dmu0)} at dt
  double error_half_dt = 0.0;  // same at dt / 2
  double order = 0.0;          // log2(error_dt / error_half_dt)
};

/// Runs exact_perp and imex_cn from lambda0 up to t_end at dt and dt / 2 and compares
/// the records at shared times.
CrossValidation cross_validate(const ConformalBackground& bg, const SpectralField& lambda0, double dt, double t_end,
                               int monitor_stride = 10);

}  // namespace crq
