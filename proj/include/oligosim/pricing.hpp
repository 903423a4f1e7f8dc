#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "oligosim/market.hpp"

namespace oligosim {

// Operator indices are zero-based throughout the library API.

/// Prices of every operator except i, in operator order.
std::vector<double> rival_prices(const PriceProfile& prices, std::size_t i);

/// sum_{j != i} alpha_j e^{-lambda_j}, with lambda_others indexed as in
/// rival_prices().
double rival_mass(std::size_t i, std::span<const double> lambda_others,
                  const AlphaProfile& alpha);

/// alpha_i lambda N e^{-lambda}: revenue when the market is not saturated.
double revenue_unsaturated(double alpha_i, double lambda_i, long long N);
/// alpha_i lambda N / (e^{lambda} S): revenue when every user is served.
double revenue_saturated(double alpha_i, double lambda_i, double rival_mass,
                         long long N);

/// Price that puts the profile exactly on the S = 1 boundary:
/// log(alpha_i / (1 - rival mass)), or +inf when the rivals alone saturate
/// the market.
double l0(std::size_t i, std::span<const double> lambda_others,
          const AlphaProfile& alpha);

/// Revenue of operator i at its stationary market share.
double revenue(std::size_t i, const PriceProfile& prices,
               const AlphaProfile& alpha, long long N);

struct MuBracket {
  double lower;
  double upper;
  /// log((I-1) c).  For symmetric alpha this is the log of the harmonic mean
  /// of the rivals' e^{lambda_j}.
  double h;
};

/// Interval between I/(I-1) and h that always contains mu*.
MuBracket mu_star_bracket(std::size_t i, std::span<const double> lambda_others,
                          const AlphaProfile& alpha);

/// Root mu > 1 of e^mu (mu - 1) = c, c = alpha_i / rival mass.  Safeguarded
/// Newton inside the bracket.  The stopping residual is
/// max(tol, 4 eps (c + mu^2 e^mu)), i.e. never tighter than what one ulp of
/// mu allows.  DomainError for c <= 0 or c infinite, SolverError after 200
/// iterations.
double mu_star(std::size_t i, std::span<const double> lambda_others,
               const AlphaProfile& alpha, double tol = 1e-12);

/// Same equation with c given directly, searched in [lower, upper].
double solve_mu_equation(double c, double lower, double upper, double tol);

enum class BestResponseBranch { UnitPriceA, InteriorB, BoundaryC };

std::string_view to_string(BestResponseBranch b) noexcept;

struct BestResponseOutcome {
  double price = 0.0;
  BestResponseBranch branch = BestResponseBranch::UnitPriceA;
  /// NaN when the unit price was feasible and mu* was not needed.
  double mu_star;
  double l0;
  double h;
};

BestResponseOutcome best_response(std::size_t i,
                                  std::span<const double> lambda_others,
                                  const AlphaProfile& alpha);

/// Ordinal potential of the price game.  DomainError if some price is 0.
double potential(const PriceProfile& prices, const AlphaProfile& alpha);

class UpdateSchedule {
 public:
  static UpdateSchedule round_robin();
  /// Operator k has already committed its price; the others respond first
  /// and k closes every round.
  static UpdateSchedule first_mover(std::size_t k);
  static UpdateSchedule permutation(std::vector<std::size_t> order);

  std::vector<std::size_t> order_for(std::size_t operators) const;

 private:
  enum class Kind { RoundRobin, FirstMover, Permutation };
  Kind kind_ = Kind::RoundRobin;
  std::size_t first_ = 0;
  std::vector<std::size_t> order_;
};

struct TraceEntry {
  std::size_t round;
  std::size_t op;
  double old_price;
  double new_price;
  double potential;
  Region region;
};

struct EquilibriumResult {
  PriceProfile prices;
  std::vector<double> revenues;
  RegionLabel region{Region::A, 0.0};
  std::size_t rounds = 0;
  bool converged = false;
  /// false only for closed-form equilibria inside A2, where the symmetric
  /// point is one of infinitely many.
  bool unique = true;
  std::vector<TraceEntry> trace;
};

struct DynamicsOptions {
  UpdateSchedule schedule = UpdateSchedule::round_robin();
  double br_tol = 1e-9;
  std::size_t max_rounds = 1000;
  double tol_C = kDefaultTolC;
};

/// Sequential myopic best responses until a full round moves no price by more
/// than br_tol and every price is its own best response.  The potential is
/// checked after every update; a decrease larger than 1e-12 throws
/// InternalError.
EquilibriumResult best_response_dynamics(const PriceProfile& initial,
                                         const AlphaProfile& alpha, long long N,
                                         const DynamicsOptions& options = {});

enum class AlphaRegion { A1, A2, A3 };

std::string_view to_string(AlphaRegion r) noexcept;

/// A1 = (0, e/I), A2 = [e/I, e^{I/(I-1)}/I], A3 = (e^{I/(I-1)}/I, inf).
AlphaRegion alpha_region(double alpha, int I);

/// Closed-form symmetric equilibrium.  Inside A2 the symmetric point
/// log(I alpha) is returned and flagged non-unique.
EquilibriumResult symmetric_ne(double alpha, int I, long long N);
/// InvalidParameter for a heterogeneous alpha profile.
EquilibriumResult symmetric_ne(const AlphaProfile& alpha, long long N);

}  // namespace oligosim
