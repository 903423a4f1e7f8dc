#include "oligosim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "oligosim/errors.hpp"

namespace oligosim {

namespace {

inline double pos(double v) { return v > 0.0 ? v : 0.0; }

void check_dimensions(const PopulationState& s, const PriceProfile& p,
                      const MarketConfig& cfg) {
  const auto I = static_cast<std::size_t>(cfg.I());
  if (s.operators() != I || p.size() != I) {
    throw InvalidParameter("state/price dimension does not match I = " +
                           std::to_string(I));
  }
}

}  // namespace

PopulationState::PopulationState(std::vector<double> shares, double neutral)
    : x(std::move(shares)), x0(neutral) {}

PopulationState PopulationState::from_packed(std::span<const double> packed) {
  if (packed.size() < 2) {
    throw InvalidParameter("packed state needs at least one operator");
  }
  return PopulationState(
      std::vector<double>(packed.begin(), packed.end() - 1), packed.back());
}

std::vector<double> PopulationState::packed() const {
  std::vector<double> y(x);
  y.push_back(x0);
  return y;
}

double PopulationState::total() const noexcept {
  return std::accumulate(x.begin(), x.end(), x0);
}

bool PopulationState::on_simplex(double tol) const noexcept {
  if (x0 < 0.0) return false;
  for (double v : x) {
    if (v < 0.0) return false;
  }
  return std::abs(total() - 1.0) <= tol;
}

bool PopulationState::admissible_start() const noexcept {
  return std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; }) &&
         x0 < 1.0;
}

SwitchRates::SwitchRates(std::size_t operators)
    : n_(operators + 1), rates_(n_ * n_, 0.0) {}

SwitchRates switch_rates(const PopulationState& state,
                         const PriceProfile& prices, const MarketConfig& cfg) {
  check_dimensions(state, prices, cfg);
  const std::size_t I = state.operators();
  std::vector<double> u(I);
  for (std::size_t i = 0; i < I; ++i) {
    if (!(state.x[i] > 0.0)) {
      throw DomainError("operator " + std::to_string(i + 1) +
                        " has zero share; its utility is undefined");
    }
    u[i] = user_utility(cfg.W()[i], cfg.N(), state.x[i], prices[i]);
  }
  const double U0 = cfg.U0();
  SwitchRates r(I);
  const std::size_t n0 = r.neutral();
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < I; ++j) {
      if (i != j) r.at(i, j) = state.x[j] * pos(u[j] - u[i]);
    }
    r.at(i, n0) = cfg.gamma() * pos(U0 - u[i]);
    r.at(n0, i) = state.x[i] * pos(u[i] - U0);
  }
  return r;
}

MeanDynamics::MeanDynamics(const PriceProfile& prices, const MarketConfig& cfg)
    : U0_(cfg.U0()), gamma_(cfg.gamma()) {
  const auto I = static_cast<std::size_t>(cfg.I());
  if (prices.size() != I) {
    throw InvalidParameter("price profile length does not match I");
  }
  base_.resize(I);
  scratch_.resize(I);
  const double n = static_cast<double>(cfg.N());
  for (std::size_t i = 0; i < I; ++i) {
    base_[i] = std::log(cfg.W()[i] / n) - prices[i];
  }
}

double MeanDynamics::utility(std::size_t i, double x) const noexcept {
  if (x <= kEmptyShare) return std::numeric_limits<double>::infinity();
  return base_[i] - std::log(x);
}

void MeanDynamics::rhs(std::span<const double> y, std::span<double> dy) const {
  const std::size_t I = base_.size();
  const double x0 = y[I];
  // On the simplex this equals
  //   x_i [U_i - Ubar - x0 (U_i - U0) - gamma (U0 - U_i)_+ + x0 (U_i - U0)_+]
  // with Ubar = sum_j x_j U_j + x0 U0; written with market mass m and
  // market utility mass M so that the components cancel off the simplex too.
  double m = 0.0;
  double M = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    if (y[i] > kEmptyShare) {
      scratch_[i] = base_[i] - std::log(y[i]);
      m += y[i];
      M += y[i] * scratch_[i];
    }
  }
  double d0 = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    const double xi = y[i];
    if (xi <= kEmptyShare) {
      dy[i] = 0.0;
      continue;
    }
    const double ui = scratch_[i];
    if (!std::isfinite(ui)) throw DomainError("non-finite utility in dynamics");
    const double gain = ui - U0_;
    dy[i] = xi * (m * ui - M - gamma_ * pos(-gain) + x0 * pos(gain));
    if (gain > 0.0) {
      d0 -= x0 * xi * gain;
    } else if (gain < 0.0) {
      d0 -= gamma_ * xi * gain;
    }
    scale = std::max(scale, std::abs(dy[i]));
  }
  dy[I] = d0;
  scale = std::max({scale, std::abs(d0), 1.0});
  double sum = 0.0;
  for (std::size_t k = 0; k <= I; ++k) sum += dy[k];
  if (std::abs(sum) > 1e-12 * scale) {
    throw InternalError("mean dynamics do not conserve mass: sum = " +
                        std::to_string(sum));
  }
}

std::vector<double> mean_dynamics_rhs(const PopulationState& state,
                                      const PriceProfile& prices,
                                      const MarketConfig& cfg) {
  check_dimensions(state, prices, cfg);
  MeanDynamics f(prices, cfg);
  const auto y = state.packed();
  std::vector<double> dy(y.size());
  f.rhs(y, dy);
  return dy;
}

double population_average_utility(const PopulationState& state,
                                  std::span<const double> utilities,
                                  double U0) {
  double avg = state.x0 * U0;
  for (std::size_t i = 0; i < state.operators(); ++i) {
    if (state.x[i] > kEmptyShare) avg += state.x[i] * utilities[i];
  }
  return avg;
}

std::vector<double> operator_utilities(const PopulationState& state,
                                       const PriceProfile& prices,
                                       const MarketConfig& cfg) {
  check_dimensions(state, prices, cfg);
  MeanDynamics f(prices, cfg);
  std::vector<double> u(state.operators());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f.utility(i, state.x[i]);
  return u;
}

Rk4Stepper::Rk4Stepper(const PriceProfile& prices, const MarketConfig& cfg)
    : f_(prices, cfg) {
  const std::size_t n = f_.dimension();
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

StepReport Rk4Stepper::step(std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  f_.rhs(y, k1_);
  for (std::size_t k = 0; k < n; ++k) tmp_[k] = y[k] + 0.5 * dt * k1_[k];
  f_.rhs(tmp_, k2_);
  for (std::size_t k = 0; k < n; ++k) tmp_[k] = y[k] + 0.5 * dt * k2_[k];
  f_.rhs(tmp_, k3_);
  for (std::size_t k = 0; k < n; ++k) tmp_[k] = y[k] + dt * k3_[k];
  f_.rhs(tmp_, k4_);

  StepReport rep;
  rep.min_coordinate = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    tmp_[k] = y[k] + dt / 6.0 * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
    rep.min_coordinate = std::min(rep.min_coordinate, tmp_[k]);
    sum += tmp_[k];
  }
  rep.simplex_defect = std::abs(sum - 1.0);

  // drift correction: clamp and renormalise
  double clamped = 0.0;
  for (std::size_t k = 0; k < n; ++k) clamped += std::max(tmp_[k], 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double corrected = std::max(tmp_[k], 0.0) / clamped;
    rep.correction = std::max(rep.correction, std::abs(corrected - tmp_[k]));
    y[k] = corrected;
  }
  if (rep.correction > kMaxStepCorrection) {
    throw StepSizeError("simplex correction " + std::to_string(rep.correction) +
                        " exceeds 1e-8; reduce dt");
  }
  return rep;
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, std::abs(d));
  return m;
}

void record(Trajectory& tr, double t, std::span<const double> y,
            const MeanDynamics& f) {
  tr.times.push_back(t);
  auto s = PopulationState::from_packed(y);
  std::vector<double> u(s.operators());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f.utility(i, s.x[i]);
  tr.states.push_back(std::move(s));
  tr.utilities.push_back(std::move(u));
}

}  // namespace

Trajectory integrate(const PopulationState& start, const PriceProfile& prices,
                     const MarketConfig& cfg,
                     const IntegrationOptions& options) {
  check_dimensions(start, prices, cfg);
  if (!(options.dt > 0.0) || !(options.t_max > 0.0) ||
      !(options.settle_tol > 0.0) || options.record_stride == 0) {
    throw InvalidParameter("dt, t_max, settle_tol and record_stride must be positive");
  }
  if (!start.admissible_start()) {
    throw InvalidParameter("initial state needs x_i(0) > 0 for every operator");
  }
  if (!start.on_simplex()) {
    throw InvalidParameter("initial state is not on the probability simplex");
  }

  Rk4Stepper stepper(prices, cfg);
  const MeanDynamics& f = stepper.field();
  std::vector<double> y = start.packed();
  std::vector<double> dy(y.size());

  Trajectory tr;
  tr.min_coordinate = *std::min_element(y.begin(), y.end());
  record(tr, 0.0, y, f);

  f.rhs(y, dy);
  if (max_abs(dy) < options.settle_tol) {
    tr.settled = true;
    return tr;
  }

  const auto max_steps =
      static_cast<std::size_t>(std::ceil(options.t_max / options.dt - 1e-9));
  bool recorded_last = true;
  while (tr.steps < max_steps) {
    const StepReport rep = stepper.step(y, options.dt);
    ++tr.steps;
    tr.max_simplex_defect = std::max(tr.max_simplex_defect, rep.simplex_defect);
    tr.min_coordinate = std::min(tr.min_coordinate, rep.min_coordinate);
    tr.max_correction = std::max(tr.max_correction, rep.correction);

    const double t = static_cast<double>(tr.steps) * options.dt;
    recorded_last = tr.steps % options.record_stride == 0;
    if (recorded_last) record(tr, t, y, f);

    f.rhs(y, dy);
    if (max_abs(dy) < options.settle_tol) {
      tr.settled = true;
      break;
    }
  }
  if (!recorded_last) {
    record(tr, static_cast<double>(tr.steps) * options.dt, y, f);
  }
  return tr;
}

double max_norm_distance(const PopulationState& a, const PopulationState& b) {
  if (a.operators() != b.operators()) {
    throw InvalidParameter("states differ in dimension");
  }
  double d = std::abs(a.x0 - b.x0);
  for (std::size_t i = 0; i < a.operators(); ++i) {
    d = std::max(d, std::abs(a.x[i] - b.x[i]));
  }
  return d;
}

}  // namespace oligosim
