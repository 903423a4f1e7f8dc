#include "oligosim/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "oligosim/errors.hpp"

namespace oligosim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_rivals(std::size_t i, std::span<const double> lambda_others,
                  const AlphaProfile& alpha) {
  if (i >= alpha.size()) throw InvalidParameter("operator index out of range");
  if (lambda_others.size() + 1 != alpha.size()) {
    throw InvalidParameter("expected I-1 rival prices");
  }
}

double mu_residual(double mu, double c) { return std::exp(mu) * (mu - 1.0) - c; }

double attainable_residual(double mu, double c) {
  return 4.0 * kEps * (c + mu * mu * std::exp(mu));
}

}  // namespace

std::vector<double> rival_prices(const PriceProfile& prices, std::size_t i) {
  if (i >= prices.size()) throw InvalidParameter("operator index out of range");
  std::vector<double> out;
  out.reserve(prices.size() - 1);
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (j != i) out.push_back(prices[j]);
  }
  return out;
}

double rival_mass(std::size_t i, std::span<const double> lambda_others,
                  const AlphaProfile& alpha) {
  check_rivals(i, lambda_others, alpha);
  double s = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (j == i) continue;
    s += alpha[j] * std::exp(-lambda_others[k++]);
  }
  return s;
}

double revenue_unsaturated(double alpha_i, double lambda_i, long long N) {
  return alpha_i * lambda_i * static_cast<double>(N) * std::exp(-lambda_i);
}

double revenue_saturated(double alpha_i, double lambda_i, double rivals,
                         long long N) {
  // alpha_i lambda N / (e^lambda (alpha_i e^-lambda + rivals))
  return alpha_i * lambda_i * static_cast<double>(N) /
         (alpha_i + rivals * std::exp(lambda_i));
}

double l0(std::size_t i, std::span<const double> lambda_others,
          const AlphaProfile& alpha) {
  const double rivals = rival_mass(i, lambda_others, alpha);
  if (rivals >= 1.0) return kInf;
  return std::log(alpha[i] / (1.0 - rivals));
}

double revenue(std::size_t i, const PriceProfile& prices,
               const AlphaProfile& alpha, long long N) {
  const auto others = rival_prices(prices, i);
  const double boundary = l0(i, others, alpha);
  const double li = prices[i];
  if (li < boundary) {
    return revenue_saturated(alpha[i], li, rival_mass(i, others, alpha), N);
  }
  return revenue_unsaturated(alpha[i], li, N);
}

MuBracket mu_star_bracket(std::size_t i, std::span<const double> lambda_others,
                          const AlphaProfile& alpha) {
  const double rivals = rival_mass(i, lambda_others, alpha);
  const double c = alpha[i] / rivals;
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("mu* equation needs a finite positive right-hand side");
  }
  const auto I = static_cast<double>(alpha.size());
  const double knee = I / (I - 1.0);
  const double h = std::log((I - 1.0) * c);
  return {std::min(knee, h), std::max(knee, h), h};
}

double solve_mu_equation(double c, double lower, double upper, double tol) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("mu* equation needs a finite positive right-hand side");
  }
  double lo = std::max(lower, 1.0 + 1e-12);
  double hi = std::max(upper, lo);
  if (mu_residual(lo, c) > 0.0) lo = 1.0;  // f(1) = -c < 0
  while (mu_residual(hi, c) < 0.0) hi = 2.0 * hi;

  double mu = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = mu_residual(mu, c);
    if (std::abs(f) <= std::max(tol, attainable_residual(mu, c))) return mu;
    if (f < 0.0) {
      lo = mu;
    } else {
      hi = mu;
    }
    const double newton = mu - f / (std::exp(mu) * mu);
    mu = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * kEps * hi) {
      // bracket collapsed to adjacent doubles: take the better endpoint
      return std::abs(mu_residual(lo, c)) < std::abs(mu_residual(hi, c)) ? lo : hi;
    }
  }
  throw SolverError("mu* iteration did not converge in 200 steps");
}

double mu_star(std::size_t i, std::span<const double> lambda_others,
               const AlphaProfile& alpha, double tol) {
  const MuBracket br = mu_star_bracket(i, lambda_others, alpha);
  const double c = alpha[i] / rival_mass(i, lambda_others, alpha);
  const double mu = solve_mu_equation(c, br.lower, br.upper, tol);
  const double slack = 1e-9 * std::max(1.0, br.upper);
  if (mu < br.lower - slack || mu > br.upper + slack) {
    throw InternalError("mu* = " + std::to_string(mu) +
                        " escaped its bracket [" + std::to_string(br.lower) +
                        ", " + std::to_string(br.upper) + "]");
  }
  return mu;
}

std::string_view to_string(BestResponseBranch b) noexcept {
  switch (b) {
    case BestResponseBranch::UnitPriceA: return "UnitPriceA";
    case BestResponseBranch::InteriorB: return "InteriorB";
    case BestResponseBranch::BoundaryC: return "BoundaryC";
  }
  return "?";
}

BestResponseOutcome best_response(std::size_t i,
                                  std::span<const double> lambda_others,
                                  const AlphaProfile& alpha) {
  const double rivals = rival_mass(i, lambda_others, alpha);
  BestResponseOutcome out{};
  out.l0 = rivals >= 1.0 ? kInf : std::log(alpha[i] / (1.0 - rivals));
  out.mu_star = kNaN;
  out.h = kNaN;

  if (alpha[i] * std::exp(-1.0) + rivals < 1.0) {
    out.price = 1.0;
    out.branch = BestResponseBranch::UnitPriceA;
    return out;
  }
  const MuBracket br = mu_star_bracket(i, lambda_others, alpha);
  out.h = br.h;
  out.mu_star = mu_star(i, lambda_others, alpha);
  if (alpha[i] * std::exp(-out.mu_star) + rivals > 1.0) {
    out.price = out.mu_star;
    out.branch = BestResponseBranch::InteriorB;
  } else {
    out.price = out.l0;
    out.branch = BestResponseBranch::BoundaryC;
  }
  return out;
}

double potential(const PriceProfile& prices, const AlphaProfile& alpha) {
  double p = 0.0;
  for (double l : prices.lambda) {
    if (!(l > 0.0)) throw DomainError("potential needs strictly positive prices");
    p += std::log(l) - l;
  }
  const double s = discriminant(prices.lambda, alpha);
  if (s > 1.0) p -= std::log(s);
  return p;
}

UpdateSchedule UpdateSchedule::round_robin() { return {}; }

UpdateSchedule UpdateSchedule::first_mover(std::size_t k) {
  UpdateSchedule s;
  s.kind_ = Kind::FirstMover;
  s.first_ = k;
  return s;
}

UpdateSchedule UpdateSchedule::permutation(std::vector<std::size_t> order) {
  UpdateSchedule s;
  s.kind_ = Kind::Permutation;
  s.order_ = std::move(order);
  return s;
}

std::vector<std::size_t> UpdateSchedule::order_for(std::size_t operators) const {
  std::vector<std::size_t> order(operators);
  std::iota(order.begin(), order.end(), std::size_t{0});
  switch (kind_) {
    case Kind::RoundRobin:
      break;
    case Kind::FirstMover:
      if (first_ >= operators) {
        throw InvalidParameter("first mover index out of range");
      }
      std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_ + 1),
                  order.end());
      break;
    case Kind::Permutation: {
      auto sorted = order_;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != order) {
        throw InvalidParameter("update order is not a permutation of the operators");
      }
      order = order_;
      break;
    }
  }
  return order;
}

EquilibriumResult best_response_dynamics(const PriceProfile& initial,
                                         const AlphaProfile& alpha, long long N,
                                         const DynamicsOptions& options) {
  if (initial.size() != alpha.size()) {
    throw InvalidParameter("price profile length does not match alpha");
  }
  for (double l : initial.lambda) {
    if (!(l > 0.0)) throw InvalidParameter("initial prices must be positive");
  }
  const auto order = options.schedule.order_for(alpha.size());

  EquilibriumResult res;
  res.prices = initial;
  std::vector<double>& lam = res.prices.lambda;
  double P = potential(res.prices, alpha);

  auto is_fixed_point = [&]() {
    for (std::size_t i = 0; i < lam.size(); ++i) {
      const auto br = best_response(i, rival_prices(res.prices, i), alpha);
      if (std::abs(std::min(br.price, res.prices.lambda_max) - lam[i]) >
          options.br_tol) {
        return false;
      }
    }
    return true;
  };

  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    double moved = 0.0;
    for (std::size_t i : order) {
      const auto br = best_response(i, rival_prices(res.prices, i), alpha);
      const double next = std::min(br.price, res.prices.lambda_max);
      const double prev = lam[i];
      lam[i] = next;
      const double Pn = potential(res.prices, alpha);
      if (Pn < P - 1e-12 * std::max(1.0, std::abs(P))) {
        throw InternalError("potential decreased along a best response path");
      }
      P = Pn;
      moved = std::max(moved, std::abs(next - prev));
      res.trace.push_back(
          {round, i, prev, next, Pn, classify(res.prices, alpha, options.tol_C).region});
    }
    res.rounds = round;
    if (moved <= options.br_tol && is_fixed_point()) {
      res.converged = true;
      break;
    }
  }
  res.region = classify(res.prices, alpha, options.tol_C);
  res.revenues.resize(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    res.revenues[i] = revenue(i, res.prices, alpha, N);
  }
  return res;
}

std::string_view to_string(AlphaRegion r) noexcept {
  switch (r) {
    case AlphaRegion::A1: return "A1";
    case AlphaRegion::A2: return "A2";
    case AlphaRegion::A3: return "A3";
  }
  return "?";
}

AlphaRegion alpha_region(double alpha, int I) {
  if (I < 2) throw InvalidParameter("I must be >= 2");
  if (!(alpha > 0.0)) throw InvalidParameter("alpha must be positive");
  const double n = static_cast<double>(I);
  if (alpha < std::numbers::e / n) return AlphaRegion::A1;
  if (alpha > std::exp(n / (n - 1.0)) / n) return AlphaRegion::A3;
  return AlphaRegion::A2;
}

EquilibriumResult symmetric_ne(double alpha, int I, long long N) {
  const AlphaRegion region = alpha_region(alpha, I);
  const double n = static_cast<double>(I);
  const double nn = static_cast<double>(N);
  double price = 0.0;
  double rev = 0.0;
  EquilibriumResult res;
  switch (region) {
    case AlphaRegion::A1:
      price = 1.0;
      rev = alpha * nn / std::numbers::e;
      break;
    case AlphaRegion::A3:
      price = n / (n - 1.0);
      rev = nn / (n - 1.0);
      break;
    case AlphaRegion::A2:
      price = std::log(n * alpha);
      rev = nn * price / n;
      res.unique = alpha == std::numbers::e / n ||
                   alpha == std::exp(n / (n - 1.0)) / n;
      break;
  }
  const auto I_sz = static_cast<std::size_t>(I);
  res.prices = PriceProfile::uniform(price, I_sz);
  res.revenues.assign(I_sz, rev);
  const double S = n * alpha * std::exp(-price);
  switch (region) {
    case AlphaRegion::A1: res.region = {Region::A, S}; break;
    case AlphaRegion::A2: res.region = {Region::C, S}; break;
    case AlphaRegion::A3: res.region = {Region::B, S}; break;
  }
  res.converged = true;
  return res;
}

EquilibriumResult symmetric_ne(const AlphaProfile& alpha, long long N) {
  if (!alpha.symmetric) {
    throw InvalidParameter(
        "closed-form equilibria need identical alpha; use best_response_dynamics");
  }
  return symmetric_ne(alpha[0], static_cast<int>(alpha.size()), N);
}

}  // namespace oligosim
