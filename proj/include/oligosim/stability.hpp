#pragma once

#include <cstddef>
#include <vector>

#include "oligosim/dynamics.hpp"
#include "oligosim/stationary.hpp"

namespace oligosim {

struct EssOptions {
  double dt = 0.01;
  double t_max = 1e5;
};

struct PerturbationOutcome {
  std::size_t from;  // strategy index, I = neutral operator
  std::size_t to;
  bool returned = false;
  double return_time = 0.0;
  double final_distance = 0.0;
};

/// Moves eps of mass along every ordered pair of strategies (sources with
/// less than eps mass are skipped) and integrates the mean dynamics from each
/// perturbed state.
std::vector<PerturbationOutcome> ess_perturbations(
    const StationaryPoint& point, const PriceProfile& prices,
    const MarketConfig& cfg, double eps, const EssOptions& options = {});

/// True iff every perturbed trajectory re-enters the eps/10 max-norm ball
/// around the point before t_max.  eps == 0 is vacuously stable.
bool ess_perturb_check(const StationaryPoint& point, const PriceProfile& prices,
                       const MarketConfig& cfg, double eps,
                       const EssOptions& options = {});

}  // namespace oligosim
