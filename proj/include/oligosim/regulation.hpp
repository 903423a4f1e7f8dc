#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "oligosim/market.hpp"
#include "oligosim/pricing.hpp"
#include "oligosim/stationary.hpp"

namespace oligosim {

/// Market outcome at the operators' equilibrium for one symmetric instance.
struct EfficiencyReport {
  double param_value = 0.0;
  double alpha = 0.0;
  double lambda_star = 0.0;
  double U_agg = 0.0;
  double J0 = 0.0;
  double R_total = 0.0;
  double x0_share = 0.0;
  AlphaRegion region = AlphaRegion::A1;
};

enum class SweepParameter { W, U0, Alpha };
enum class Objective { TotalRevenue, AggregateUtility };

std::string_view to_string(SweepParameter p) noexcept;
SweepParameter parse_sweep_parameter(std::string_view name);
Objective parse_objective(std::string_view name);

struct SweepSeries {
  SweepParameter swept = SweepParameter::W;
  std::vector<double> values;
  std::vector<EfficiencyReport> reports;
};

/// N U0 on A1 and A2, N (log(W I / N) - I/(I-1)) on A3.
double aggregate_utility(double W, long long N, int I, double U0);

/// N (sum_i x_i U_i + x_0 U_0) evaluated at a stationary point.
double aggregate_utility_at(const StationaryPoint& point, long long N);

/// J_0 = x_0 N U_0.
double neutral_cost(const StationaryPoint& point, long long N, double U0);

/// alpha I N U0 / e on A1, 0 elsewhere.  This is the closed form printed next
/// to the definition, kept for comparison; it disagrees with x_0 N U_0 on A1.
double neutral_cost_displayed(double alpha, int I, long long N, double U0);

/// I times the per-operator equilibrium revenue (symmetric point in A2).
double total_revenue_at_ne(double alpha, int I, long long N);

struct ReportOptions {
  /// Use x_0 N U_0 (default) or the displayed A1 formula for J0.
  bool displayed_j0 = false;
  /// Run best_response_dynamics from these prices instead of the closed-form
  /// symmetric equilibrium.  lambda_star then reports operator 1's price.
  std::optional<std::vector<double>> dynamics_start;
  UpdateSchedule schedule = UpdateSchedule::round_robin();
};

/// EfficiencyReport for a symmetric market instance.
EfficiencyReport efficiency_report(const MarketConfig& cfg,
                                   const ReportOptions& options = {});

/// Evaluates the template with the parameter replaced by every grid value.
/// W and alpha sweeps keep U0; alpha sweeps set W = alpha N e^{U0}.  The grid
/// must be strictly monotone.
SweepSeries sweep(const MarketConfig& base, SweepParameter parameter,
                  const std::vector<double>& grid,
                  const ReportOptions& options = {});

/// Market instance with the swept parameter set to value.
MarketConfig apply_parameter(const MarketConfig& base, SweepParameter parameter,
                             double value);

/// Bisection for the parameter value (W or U0) at which the objective comes
/// within tol of target.  When a flat segment reaches the target, the edge of
/// that segment facing the rest of the bracket is returned, i.e. the first
/// value met when moving toward the target.  RangeError if the target is not
/// reachable on the bracket.
double find_parameter(const MarketConfig& base, SweepParameter parameter,
                      Objective objective, double target, double lo, double hi,
                      double tol = 1e-9);

}  // namespace oligosim
