#include "oligosim/stationary.hpp"

#include <cmath>

#include "oligosim/errors.hpp"

namespace oligosim {

StationaryPoint stationary_point(const PriceProfile& prices,
                                 const MarketConfig& cfg) {
  const AlphaProfile& alpha = cfg.alpha();
  if (prices.size() != alpha.size()) {
    throw InvalidParameter("price profile length does not match I");
  }
  const RegionLabel label = classify(prices, alpha, cfg.tol_C());
  const std::size_t I = alpha.size();

  std::vector<double> x(I);
  for (std::size_t i = 0; i < I; ++i) x[i] = alpha[i] * std::exp(-prices[i]);

  StationaryPoint p;
  p.case_label = label.region;
  p.U0 = cfg.U0();
  p.S = label.S;
  switch (label.region) {
    case Region::A:
      p.state = PopulationState(std::move(x), 1.0 - label.S);
      break;
    case Region::B:
    case Region::C:
      for (double& v : x) v /= label.S;
      p.state = PopulationState(std::move(x), 0.0);
      break;
  }
  p.utilities = utilities_at(p, prices, cfg);
  return p;
}

std::vector<double> utilities_at(const StationaryPoint& point,
                                 const PriceProfile& prices,
                                 const MarketConfig& cfg) {
  const std::size_t I = point.state.operators();
  std::vector<double> u(I);
  for (std::size_t i = 0; i < I; ++i) {
    u[i] = user_utility(cfg.W()[i], cfg.N(), point.state.x[i], prices[i]);
  }
  return u;
}

}  // namespace oligosim
