#pragma once

#include <vector>

#include "oligosim/dynamics.hpp"
#include "oligosim/market.hpp"

namespace oligosim {

/// Closed-form fixed point of the user market for a given price profile.
///
///  - A: x_i = alpha_i e^{-lambda_i}, x_0 = 1 - S, every U_i = U0
///  - B: x_i = alpha_i e^{-lambda_i} / S, x_0 = 0, every U_i = U0 + log S
///  - C: x_i = alpha_i e^{-lambda_i} (normalised by S, which is 1 within
///       tol_C), x_0 = 0, every U_i = U0
struct StationaryPoint {
  PopulationState state;
  Region case_label = Region::A;
  std::vector<double> utilities;
  double U0 = 0.0;
  /// S(lambda) used for the classification.
  double S = 0.0;
};

StationaryPoint stationary_point(const PriceProfile& prices,
                                 const MarketConfig& cfg);

/// Per-operator utilities of the point, evaluated through user_utility.
std::vector<double> utilities_at(const StationaryPoint& point,
                                 const PriceProfile& prices,
                                 const MarketConfig& cfg);

}  // namespace oligosim
