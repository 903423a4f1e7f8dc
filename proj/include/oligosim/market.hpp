#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace oligosim {

inline constexpr double kDefaultTolC = 1e-9;
inline constexpr double kDefaultLambdaMax = 100.0;
inline constexpr double kDefaultGamma = 1.0;
inline constexpr double kSymmetryTol = 1e-12;

/// alpha = W / (N e^{U0}).  Throws InvalidParameter when the result is not
/// finite and positive.
double alpha_of(double W, long long N, double U0);

/// Net utility log(W / (N x)) - lambda of a user served by an operator holding
/// share x.  Throws DomainError for x <= 0.
double user_utility(double W, long long N, double x, double lambda);

/// Per-operator alpha values.
struct AlphaProfile {
  std::vector<double> values;
  bool symmetric = false;

  static AlphaProfile from(std::vector<double> values);
  static AlphaProfile uniform(double alpha, std::size_t operators);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Immutable market instance. All population math is done in shares; N only
/// scales utilities and revenues.
class MarketConfig {
 public:
  MarketConfig(long long N, std::vector<double> W, double U0,
               double gamma = kDefaultGamma,
               double lambda_max = kDefaultLambdaMax,
               double tol_C = kDefaultTolC);

  /// Symmetric market: every operator holds the same spectrum W.
  static MarketConfig symmetric(long long N, int I, double W, double U0,
                                double gamma = kDefaultGamma);

  long long N() const noexcept { return N_; }
  int I() const noexcept { return static_cast<int>(W_.size()); }
  const std::vector<double>& W() const noexcept { return W_; }
  double U0() const noexcept { return U0_; }
  double gamma() const noexcept { return gamma_; }
  double lambda_max() const noexcept { return lambda_max_; }
  double tol_C() const noexcept { return tol_C_; }
  const AlphaProfile& alpha() const noexcept { return alpha_; }

  MarketConfig with_W(std::vector<double> W) const;
  MarketConfig with_U0(double U0) const;

 private:
  long long N_;
  std::vector<double> W_;
  double U0_;
  double gamma_;
  double lambda_max_;
  double tol_C_;
  AlphaProfile alpha_;
};

/// Operator prices, each in [0, lambda_max].
struct PriceProfile {
  std::vector<double> lambda;
  double lambda_max = kDefaultLambdaMax;

  PriceProfile() = default;
  explicit PriceProfile(std::vector<double> prices,
                        double lambda_max = kDefaultLambdaMax);
  static PriceProfile uniform(double price, std::size_t operators,
                              double lambda_max = kDefaultLambdaMax);

  std::size_t size() const noexcept { return lambda.size(); }
  double operator[](std::size_t i) const { return lambda[i]; }
};

enum class Region { A, B, C };

std::string_view to_string(Region r) noexcept;

struct RegionLabel {
  Region region;
  /// S(lambda) = sum_i alpha_i e^{-lambda_i}
  double S;
};

/// S(lambda) = sum_i alpha_i e^{-lambda_i}.
double discriminant(std::span<const double> prices, const AlphaProfile& alpha);

/// A iff S < 1 - tol_C, B iff S > 1 + tol_C, C otherwise.
RegionLabel classify(const PriceProfile& prices, const AlphaProfile& alpha,
                     double tol_C = kDefaultTolC);

}  // namespace oligosim
