#include "oligosim/regulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oligosim/errors.hpp"

namespace oligosim {

std::string_view to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::W: return "W";
    case SweepParameter::U0: return "U0";
    case SweepParameter::Alpha: return "alpha";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "W") return SweepParameter::W;
  if (name == "U0") return SweepParameter::U0;
  if (name == "alpha") return SweepParameter::Alpha;
  throw InvalidParameter("unknown sweep parameter '" + std::string(name) +
                         "' (expected W, U0 or alpha)");
}

Objective parse_objective(std::string_view name) {
  if (name == "total_revenue") return Objective::TotalRevenue;
  if (name == "U_agg") return Objective::AggregateUtility;
  throw InvalidParameter("unknown objective '" + std::string(name) +
                         "' (expected total_revenue or U_agg)");
}

double aggregate_utility(double W, long long N, int I, double U0) {
  const double alpha = alpha_of(W, N, U0);
  const double nn = static_cast<double>(N);
  if (alpha_region(alpha, I) == AlphaRegion::A3) {
    const double n = static_cast<double>(I);
    return nn * (std::log(W * n / nn) - n / (n - 1.0));
  }
  return nn * U0;
}

double aggregate_utility_at(const StationaryPoint& point, long long N) {
  double total = point.state.x0 * point.U0;
  for (std::size_t i = 0; i < point.state.operators(); ++i) {
    total += point.state.x[i] * point.utilities[i];
  }
  return static_cast<double>(N) * total;
}

double neutral_cost(const StationaryPoint& point, long long N, double U0) {
  return point.state.x0 * static_cast<double>(N) * U0;
}

double neutral_cost_displayed(double alpha, int I, long long N, double U0) {
  if (alpha_region(alpha, I) != AlphaRegion::A1) return 0.0;
  return alpha * static_cast<double>(I) * static_cast<double>(N) * U0 /
         std::numbers::e;
}

double total_revenue_at_ne(double alpha, int I, long long N) {
  const EquilibriumResult ne = symmetric_ne(alpha, I, N);
  return static_cast<double>(I) * ne.revenues.front();
}

EfficiencyReport efficiency_report(const MarketConfig& cfg,
                                   const ReportOptions& options) {
  const AlphaProfile& alpha = cfg.alpha();
  if (!alpha.symmetric) {
    throw InvalidParameter("efficiency reports need a symmetric market");
  }
  const int I = cfg.I();
  const long long N = cfg.N();

  EfficiencyReport rep;
  rep.alpha = alpha[0];
  rep.region = alpha_region(rep.alpha, I);

  EquilibriumResult ne;
  if (options.dynamics_start) {
    DynamicsOptions dyn;
    dyn.schedule = options.schedule;
    dyn.tol_C = cfg.tol_C();
    ne = best_response_dynamics(PriceProfile(*options.dynamics_start, cfg.lambda_max()),
                                alpha, N, dyn);
  } else {
    ne = symmetric_ne(rep.alpha, I, N);
  }
  const StationaryPoint point = stationary_point(ne.prices, cfg);

  rep.lambda_star = ne.prices[0];
  rep.x0_share = point.state.x0;
  if (options.dynamics_start) {
    rep.R_total = 0.0;
    for (double r : ne.revenues) rep.R_total += r;
    rep.U_agg = aggregate_utility_at(point, N);
  } else {
    rep.R_total = total_revenue_at_ne(rep.alpha, I, N);
    rep.U_agg = aggregate_utility(cfg.W()[0], N, I, cfg.U0());
  }
  rep.J0 = options.displayed_j0
               ? neutral_cost_displayed(rep.alpha, I, N, cfg.U0())
               : neutral_cost(point, N, cfg.U0());
  return rep;
}

MarketConfig apply_parameter(const MarketConfig& base, SweepParameter parameter,
                             double value) {
  const auto I = static_cast<std::size_t>(base.I());
  switch (parameter) {
    case SweepParameter::W:
      return base.with_W(std::vector<double>(I, value));
    case SweepParameter::U0:
      return base.with_U0(value);
    case SweepParameter::Alpha:
      return base.with_W(std::vector<double>(
          I, value * static_cast<double>(base.N()) * std::exp(base.U0())));
  }
  throw InvalidParameter("unknown sweep parameter");
}

SweepSeries sweep(const MarketConfig& base, SweepParameter parameter,
                  const std::vector<double>& grid,
                  const ReportOptions& options) {
  if (grid.empty()) throw InvalidParameter("sweep grid is empty");
  if (grid.size() > 1) {
    const bool up = grid[1] > grid[0];
    for (std::size_t k = 1; k < grid.size(); ++k) {
      if (up ? !(grid[k] > grid[k - 1]) : !(grid[k] < grid[k - 1])) {
        throw InvalidParameter("sweep grid must be strictly monotone");
      }
    }
  }
  SweepSeries series;
  series.swept = parameter;
  series.values = grid;
  series.reports.reserve(grid.size());
  for (double v : grid) {
    EfficiencyReport rep = efficiency_report(apply_parameter(base, parameter, v), options);
    rep.param_value = v;
    series.reports.push_back(rep);
  }
  return series;
}

namespace {

double objective_value(const MarketConfig& cfg, Objective objective) {
  if (!cfg.alpha().symmetric) {
    throw InvalidParameter("find_parameter needs a symmetric market");
  }
  switch (objective) {
    case Objective::TotalRevenue:
      return total_revenue_at_ne(cfg.alpha()[0], cfg.I(), cfg.N());
    case Objective::AggregateUtility:
      return aggregate_utility(cfg.W()[0], cfg.N(), cfg.I(), cfg.U0());
  }
  throw InvalidParameter("unknown objective");
}

}  // namespace

double find_parameter(const MarketConfig& base, SweepParameter parameter,
                      Objective objective, double target, double lo, double hi,
                      double tol) {
  if (parameter == SweepParameter::Alpha) {
    throw InvalidParameter("find_parameter tunes W or U0");
  }
  if (!(lo < hi)) throw InvalidParameter("bracket must satisfy lo < hi");
  if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");

  auto f = [&](double p) {
    return objective_value(apply_parameter(base, parameter, p), objective);
  };
  const double flo = f(lo);
  const double fhi = f(hi);
  const double fmin = std::min(flo, fhi);
  const double fmax = std::max(flo, fhi);
  if (target < fmin - tol || target > fmax + tol) {
    throw RangeError("target " + std::to_string(target) +
                     " is outside the objective range [" + std::to_string(fmin) +
                     ", " + std::to_string(fmax) + "] on the bracket");
  }
  if (flo == fhi) return lo;

  // The reached set is approached from the side of the range the target is
  // farther from, so a target on a flat end segment yields the segment's edge.
  const bool from_below = fmax - target <= target - fmin;
  auto reached = [&](double p) {
    const double v = f(p);
    return from_below ? v >= target - tol : v <= target + tol;
  };
  // Reached set sits at the high end of the bracket iff fhi is on its side.
  const bool high_side = from_below == (fhi > flo);
  double a = lo;
  double b = hi;
  if (high_side ? reached(lo) : reached(hi)) return high_side ? lo : hi;
  const double width_tol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int iter = 0; iter < 200 && b - a > width_tol; ++iter) {
    const double m = 0.5 * (a + b);
    if (reached(m) == high_side) {
      b = m;
    } else {
      a = m;
    }
  }
  return high_side ? b : a;
}

}  // namespace oligosim
