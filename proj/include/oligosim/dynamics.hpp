#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oligosim/market.hpp"

namespace oligosim {

inline constexpr double kSimplexTol = 1e-9;
/// Shares at or below this are treated as empty: no utility is evaluated and
/// the coordinate's derivative is zero.
inline constexpr double kEmptyShare = 1e-15;
inline constexpr double kMaxStepCorrection = 1e-8;

/// Users distribution (x_1, ..., x_I, x_0) over the operators and the neutral
/// operator.
struct PopulationState {
  std::vector<double> x;
  double x0 = 0.0;

  PopulationState() = default;
  PopulationState(std::vector<double> shares, double neutral);

  /// Packed form (x_1, ..., x_I, x_0).
  static PopulationState from_packed(std::span<const double> packed);
  std::vector<double> packed() const;

  std::size_t operators() const noexcept { return x.size(); }
  double total() const noexcept;

  /// Nonnegative coordinates summing to one within `tol`.
  bool on_simplex(double tol = kSimplexTol) const noexcept;
  /// x_i > 0 for all operators (and hence x_0 < 1).
  bool admissible_start() const noexcept;
};

/// Strategy index used by rate tables and packed vectors: operators are
/// 0..I-1, the neutral operator is I.
class SwitchRates {
 public:
  explicit SwitchRates(std::size_t operators);

  std::size_t strategies() const noexcept { return n_; }
  std::size_t neutral() const noexcept { return n_ - 1; }
  /// Per-capita rate at which users of `from` move to `to`.
  double operator()(std::size_t from, std::size_t to) const {
    return rates_[from * n_ + to];
  }
  double& at(std::size_t from, std::size_t to) { return rates_[from * n_ + to]; }

 private:
  std::size_t n_;
  std::vector<double> rates_;
};

/// Hybrid revision protocol rates: imitation between market operators and
/// from the neutral operator, direct selection (gamma) of the neutral
/// operator.  Throws DomainError if some operator has share <= 0.
SwitchRates switch_rates(const PopulationState& state,
                         const PriceProfile& prices, const MarketConfig& cfg);

/// Vector field of the mean dynamics, bound to one price profile.  Holds a
/// scratch buffer, so one instance must not be shared between threads.
class MeanDynamics {
 public:
  MeanDynamics(const PriceProfile& prices, const MarketConfig& cfg);

  std::size_t dimension() const noexcept { return base_.size() + 1; }
  std::size_t operators() const noexcept { return base_.size(); }
  double U0() const noexcept { return U0_; }
  double gamma() const noexcept { return gamma_; }

  /// Utility of operator i at share x (+inf when the share is empty).
  double utility(std::size_t i, double x) const noexcept;

  /// dy/dt for packed y = (x_1, ..., x_I, x_0).  The components sum to zero;
  /// a violation larger than 1e-12 (relative to the largest term) throws
  /// InternalError.
  void rhs(std::span<const double> y, std::span<double> dy) const;

 private:
  std::vector<double> base_;  // log(W_i / N) - lambda_i
  mutable std::vector<double> scratch_;
  double U0_;
  double gamma_;
};

/// (dx_1/dt, ..., dx_I/dt, dx_0/dt).
std::vector<double> mean_dynamics_rhs(const PopulationState& state,
                                      const PriceProfile& prices,
                                      const MarketConfig& cfg);

/// Population-wide average utility sum_i x_i U_i + x_0 U_0.
double population_average_utility(const PopulationState& state,
                                  std::span<const double> utilities, double U0);

/// Per-operator utilities at a state (+inf for empty operators).
std::vector<double> operator_utilities(const PopulationState& state,
                                       const PriceProfile& prices,
                                       const MarketConfig& cfg);

struct IntegrationOptions {
  double dt = 0.01;
  double t_max = 1e4;
  double settle_tol = 1e-10;
  /// Keep every k-th state in the trajectory (the final state is always kept).
  std::size_t record_stride = 1;
};

struct StepReport {
  /// Smallest coordinate produced by the RK4 update, before clamping.
  double min_coordinate = 0.0;
  /// |sum - 1| before the simplex correction.
  double simplex_defect = 0.0;
  /// Max-norm size of the clamp-and-renormalise correction.
  double correction = 0.0;
};

/// Classic fixed-step RK4 on the mean dynamics with simplex drift correction.
class Rk4Stepper {
 public:
  Rk4Stepper(const PriceProfile& prices, const MarketConfig& cfg);

  const MeanDynamics& field() const noexcept { return f_; }

  /// Advance y by dt in place.  Throws StepSizeError if the correction
  /// exceeds kMaxStepCorrection.
  StepReport step(std::vector<double>& y, double dt);

 private:
  MeanDynamics f_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PopulationState> states;
  std::vector<std::vector<double>> utilities;
  bool settled = false;
  std::size_t steps = 0;
  /// Worst values over every step taken (not only recorded ones).
  double max_simplex_defect = 0.0;
  double min_coordinate = 0.0;
  double max_correction = 0.0;

  const PopulationState& final_state() const { return states.back(); }
};

/// Integrate from an admissible start (every x_i > 0) until
/// max|dx/dt| < settle_tol or t_max.  A settled start yields a single-entry
/// trajectory.
Trajectory integrate(const PopulationState& start, const PriceProfile& prices,
                     const MarketConfig& cfg,
                     const IntegrationOptions& options = {});

double max_norm_distance(const PopulationState& a, const PopulationState& b);

}  // namespace oligosim
