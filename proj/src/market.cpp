#include "oligosim/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oligosim/errors.hpp"

namespace oligosim {

double alpha_of(double W, long long N, double U0) {
  if (!(W > 0.0) || !std::isfinite(W)) {
    throw InvalidParameter("W must be a positive finite number, got " +
                           std::to_string(W));
  }
  if (N < 1) {
    throw InvalidParameter("N must be >= 1");
  }
  if (!(U0 >= 0.0) || !std::isfinite(U0)) {
    throw InvalidParameter("U0 must be a nonnegative finite number");
  }
  const double a = W / (static_cast<double>(N) * std::exp(U0));
  if (!std::isfinite(a) || !(a > 0.0)) {
    throw InvalidParameter("alpha = W/(N e^U0) is not finite and positive");
  }
  return a;
}

double user_utility(double W, long long N, double x, double lambda) {
  if (!(x > 0.0)) {
    throw DomainError("user utility undefined at share x <= 0");
  }
  return std::log(W / (static_cast<double>(N) * x)) - lambda;
}

AlphaProfile AlphaProfile::from(std::vector<double> values) {
  if (values.empty()) {
    throw InvalidParameter("alpha profile is empty");
  }
  for (double a : values) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InvalidParameter("alpha values must be finite and positive");
    }
  }
  AlphaProfile p;
  p.symmetric = std::all_of(values.begin(), values.end(), [&](double a) {
    return std::abs(a - values.front()) <= kSymmetryTol;
  });
  p.values = std::move(values);
  return p;
}

AlphaProfile AlphaProfile::uniform(double alpha, std::size_t operators) {
  return from(std::vector<double>(operators, alpha));
}

MarketConfig::MarketConfig(long long N, std::vector<double> W, double U0,
                           double gamma, double lambda_max, double tol_C)
    : N_(N),
      W_(std::move(W)),
      U0_(U0),
      gamma_(gamma),
      lambda_max_(lambda_max),
      tol_C_(tol_C) {
  if (N_ < 1) throw InvalidParameter("N must be >= 1");
  if (W_.size() < 2) throw InvalidParameter("I must be >= 2");
  if (!(U0_ >= 0.0) || !std::isfinite(U0_)) {
    throw InvalidParameter("U0 must be a nonnegative finite number");
  }
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw InvalidParameter("gamma must be positive");
  }
  if (!(lambda_max_ > 0.0) || !std::isfinite(lambda_max_)) {
    throw InvalidParameter("lambda_max must be positive");
  }
  if (!(tol_C_ >= 0.0) || !std::isfinite(tol_C_)) {
    throw InvalidParameter("tol_C must be nonnegative");
  }
  std::vector<double> a;
  a.reserve(W_.size());
  for (double w : W_) a.push_back(alpha_of(w, N_, U0_));
  alpha_ = AlphaProfile::from(std::move(a));
}

MarketConfig MarketConfig::symmetric(long long N, int I, double W, double U0,
                                     double gamma) {
  if (I < 2) throw InvalidParameter("I must be >= 2");
  return MarketConfig(N, std::vector<double>(static_cast<std::size_t>(I), W),
                      U0, gamma);
}

MarketConfig MarketConfig::with_W(std::vector<double> W) const {
  return MarketConfig(N_, std::move(W), U0_, gamma_, lambda_max_, tol_C_);
}

MarketConfig MarketConfig::with_U0(double U0) const {
  return MarketConfig(N_, W_, U0, gamma_, lambda_max_, tol_C_);
}

PriceProfile::PriceProfile(std::vector<double> prices, double lmax)
    : lambda(std::move(prices)), lambda_max(lmax) {
  if (!(lambda_max > 0.0)) throw InvalidParameter("lambda_max must be > 0");
  for (double l : lambda) {
    if (!(l >= 0.0) || !(l <= lambda_max)) {
      throw InvalidParameter("price " + std::to_string(l) +
                             " outside [0, lambda_max]");
    }
  }
}

PriceProfile PriceProfile::uniform(double price, std::size_t operators,
                                   double lambda_max) {
  return PriceProfile(std::vector<double>(operators, price), lambda_max);
}

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
  }
  return "?";
}

double discriminant(std::span<const double> prices, const AlphaProfile& alpha) {
  if (prices.size() != alpha.size()) {
    throw InvalidParameter("price and alpha profiles differ in length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    s += alpha[i] * std::exp(-prices[i]);
  }
  return s;
}

RegionLabel classify(const PriceProfile& prices, const AlphaProfile& alpha,
                     double tol_C) {
  const double s = discriminant(prices.lambda, alpha);
  if (s < 1.0 - tol_C) return {Region::A, s};
  if (s > 1.0 + tol_C) return {Region::B, s};
  return {Region::C, s};
}

}  // namespace oligosim
