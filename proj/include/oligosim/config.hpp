#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oligosim/dynamics.hpp"
#include "oligosim/market.hpp"
#include "oligosim/pricing.hpp"

namespace oligosim {

/// Flat key/value settings read from a JSON object.  Every accessor throws
/// ConfigError naming the key when the value has the wrong type.
class Settings {
 public:
  Settings() = default;
  explicit Settings(nlohmann::json object);

  static Settings load(const std::filesystem::path& path);

  /// "key=value"; value is parsed as JSON, falling back to a plain string.
  void apply_override(std::string_view assignment);

  /// ConfigError for any key outside the known set.
  void check_known_keys() const;

  bool has(std::string_view key) const;
  double number(std::string_view key) const;
  double number(std::string_view key, double fallback) const;
  long long integer(std::string_view key) const;
  long long integer(std::string_view key, long long fallback) const;
  bool flag(std::string_view key, bool fallback) const;
  std::string text(std::string_view key, std::string_view fallback) const;
  /// A scalar is returned as a one-element list.
  std::vector<double> numbers(std::string_view key) const;

  const nlohmann::json& raw() const noexcept { return json_; }

  /// Keys N, I, W (scalar or list) or alpha, U0, gamma, lambda_max, tol_C.
  MarketConfig market() const;
  /// "prices": scalar (uniform) or one value per operator.
  PriceProfile prices(const MarketConfig& cfg) const;
  /// "x_init": I+1 shares (x_1..x_I, x_0); default is the uniform interior.
  PopulationState initial_state(const MarketConfig& cfg) const;
  IntegrationOptions integration() const;
  /// "schedule": round_robin, first_mover (with "first_mover" = 1-based
  /// operator) or permutation (with "order" = 1-based operators).
  UpdateSchedule schedule(int I) const;
  DynamicsOptions dynamics(const MarketConfig& cfg) const;
  /// "grid": list of values or {"from", "to", "count"}.
  std::vector<double> grid() const;

 private:
  const nlohmann::json& at(std::string_view key) const;
  nlohmann::json json_ = nlohmann::json::object();
};

}  // namespace oligosim
