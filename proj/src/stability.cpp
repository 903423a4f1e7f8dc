#include "oligosim/stability.hpp"

#include <algorithm>
#include <cmath>

#include "oligosim/errors.hpp"

namespace oligosim {

std::vector<PerturbationOutcome> ess_perturbations(
    const StationaryPoint& point, const PriceProfile& prices,
    const MarketConfig& cfg, double eps, const EssOptions& options) {
  if (!(eps >= 0.0)) throw InvalidParameter("eps must be nonnegative");
  std::vector<PerturbationOutcome> out;
  if (eps == 0.0) return out;

  const std::vector<double> base = point.state.packed();
  for (double v : base) {
    if (v > 0.0 && eps >= v) {
      throw InvalidParameter("eps must be below the smallest positive share");
    }
  }
  const double radius = eps / 10.0;
  const auto max_steps =
      static_cast<std::size_t>(std::ceil(options.t_max / options.dt - 1e-9));

  Rk4Stepper stepper(prices, cfg);
  for (std::size_t from = 0; from < base.size(); ++from) {
    if (base[from] < eps) continue;
    for (std::size_t to = 0; to < base.size(); ++to) {
      if (to == from) continue;
      std::vector<double> y = base;
      y[from] -= eps;
      y[to] += eps;

      PerturbationOutcome o{from, to};
      std::size_t step = 0;
      double dist = eps;
      while (step < max_steps) {
        stepper.step(y, options.dt);
        ++step;
        dist = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) {
          dist = std::max(dist, std::abs(y[k] - base[k]));
        }
        if (dist < radius) {
          o.returned = true;
          break;
        }
      }
      o.return_time = static_cast<double>(step) * options.dt;
      o.final_distance = dist;
      out.push_back(o);
    }
  }
  return out;
}

bool ess_perturb_check(const StationaryPoint& point, const PriceProfile& prices,
                       const MarketConfig& cfg, double eps,
                       const EssOptions& options) {
  const auto outcomes = ess_perturbations(point, prices, cfg, eps, options);
  return std::all_of(outcomes.begin(), outcomes.end(),
                     [](const PerturbationOutcome& o) { return o.returned; });
}

}  // namespace oligosim
