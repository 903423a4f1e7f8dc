#include "oligosim/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "oligosim/errors.hpp"

namespace oligosim {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 31> kKnownKeys = {
    "N",         "I",          "W",          "alpha",       "U0",
    "gamma",     "lambda_max", "tol_C",      "prices",      "x_init",
    "dt",        "t_max",      "settle_tol", "record_stride", "schedule",
    "first_mover", "order",    "br_tol",     "max_rounds",  "sweep_param",
    "grid",      "displayed_j0", "dynamics_start", "objective", "target",
    "bracket",   "find_tol",   "operator",   "eps",         "ess_dt",
    "ess_t_max"};

std::string key_name(std::string_view key) { return "'" + std::string(key) + "'"; }

[[noreturn]] void bad(std::string_view key, std::string_view what) {
  throw ConfigError("config key " + key_name(key) + ": " + std::string(what));
}

double as_number(const json& v, std::string_view key) {
  if (!v.is_number()) bad(key, "expected a number, got " + v.dump());
  return v.get<double>();
}

std::vector<double> as_numbers(const json& v, std::string_view key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) bad(key, "expected a number or a list of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) bad(key, "list entry " + e.dump() + " is not a number");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

Settings::Settings(json object) : json_(std::move(object)) {
  if (!json_.is_object()) throw ConfigError("config must be a JSON object");
}

Settings Settings::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return Settings(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
}

void Settings::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  json parsed = json::parse(value, nullptr, false);
  json_[key] = parsed.is_discarded() ? json(value) : std::move(parsed);
}

void Settings::check_known_keys() const {
  for (const auto& item : json_.items()) {
    bool known = false;
    for (auto k : kKnownKeys) known = known || item.key() == k;
    if (!known) throw ConfigError("unknown config key " + key_name(item.key()));
  }
}

bool Settings::has(std::string_view key) const {
  return json_.contains(std::string(key));
}

const json& Settings::at(std::string_view key) const {
  const auto it = json_.find(std::string(key));
  if (it == json_.end()) throw ConfigError("missing config key " + key_name(key));
  return *it;
}

double Settings::number(std::string_view key) const { return as_number(at(key), key); }

double Settings::number(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long Settings::integer(std::string_view key) const {
  const json& v = at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) {
      return static_cast<long long>(d);
    }
  }
  bad(key, "expected an integer, got " + v.dump());
}

long long Settings::integer(std::string_view key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Settings::flag(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) bad(key, "expected true or false, got " + v.dump());
  return v.get<bool>();
}

std::string Settings::text(std::string_view key, std::string_view fallback) const {
  if (!has(key)) return std::string(fallback);
  const json& v = at(key);
  if (!v.is_string()) bad(key, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

std::vector<double> Settings::numbers(std::string_view key) const {
  return as_numbers(at(key), key);
}

MarketConfig Settings::market() const {
  if (has("W") && has("alpha")) {
    throw ConfigError("config keys 'W' and 'alpha' are mutually exclusive");
  }
  if (!has("W") && !has("alpha")) throw ConfigError("missing config key 'W' (or 'alpha')");
  const long long N = integer("N");
  const double U0 = number("U0", 0.0);

  std::vector<double> W;
  const std::string_view wkey = has("W") ? "W" : "alpha";
  const std::vector<double> given = numbers(wkey);
  if (given.size() > 1) {
    if (has("I") && integer("I") != static_cast<long long>(given.size())) {
      bad("I", "does not match the length of " + key_name(wkey));
    }
    W = given;
  } else {
    const long long I = integer("I");
    if (I < 2 || I > 1'000'000) bad("I", "must be between 2 and 1e6");
    W.assign(static_cast<std::size_t>(I), given.front());
  }
  if (wkey == "alpha") {
    for (double& w : W) w *= static_cast<double>(N) * std::exp(U0);
  }
  try {
    return MarketConfig(N, std::move(W), U0, number("gamma", kDefaultGamma),
                        number("lambda_max", kDefaultLambdaMax),
                        number("tol_C", kDefaultTolC));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("market config: ") + e.what());
  }
}

PriceProfile Settings::prices(const MarketConfig& cfg) const {
  std::vector<double> p = numbers("prices");
  const auto I = static_cast<std::size_t>(cfg.I());
  if (p.size() == 1) p.assign(I, p.front());
  if (p.size() != I) bad("prices", "expected " + std::to_string(I) + " values");
  try {
    return PriceProfile(std::move(p), cfg.lambda_max());
  } catch (const InvalidParameter& e) {
    bad("prices", e.what());
  }
}

PopulationState Settings::initial_state(const MarketConfig& cfg) const {
  const auto I = static_cast<std::size_t>(cfg.I());
  if (!has("x_init")) {
    PopulationState s;
    s.x.assign(I, 1.0 / static_cast<double>(I + 1));
    s.x0 = 1.0 / static_cast<double>(I + 1);
    return s;
  }
  const std::vector<double> v = numbers("x_init");
  if (v.size() != I + 1) bad("x_init", "expected I+1 = " + std::to_string(I + 1) + " shares");
  return PopulationState::from_packed(v);
}

IntegrationOptions Settings::integration() const {
  IntegrationOptions o;
  o.dt = number("dt", o.dt);
  o.t_max = number("t_max", o.t_max);
  o.settle_tol = number("settle_tol", o.settle_tol);
  const long long stride = integer("record_stride", 1);
  if (stride < 1) bad("record_stride", "must be >= 1");
  o.record_stride = static_cast<std::size_t>(stride);
  if (!(o.dt > 0.0)) bad("dt", "must be positive");
  if (!(o.t_max > 0.0)) bad("t_max", "must be positive");
  if (!(o.settle_tol >= 0.0)) bad("settle_tol", "must be nonnegative");
  return o;
}

UpdateSchedule Settings::schedule(int I) const {
  const std::string kind = text("schedule", "round_robin");
  if (kind == "round_robin") return UpdateSchedule::round_robin();
  if (kind == "first_mover") {
    const long long k = integer("first_mover", 1);
    if (k < 1 || k > I) bad("first_mover", "must be an operator in 1.." + std::to_string(I));
    return UpdateSchedule::first_mover(static_cast<std::size_t>(k - 1));
  }
  if (kind == "permutation") {
    const std::vector<double> raw = numbers("order");
    std::vector<std::size_t> order;
    std::vector<bool> seen(static_cast<std::size_t>(I), false);
    for (double v : raw) {
      if (v != std::floor(v) || v < 1 || v > I || seen[static_cast<std::size_t>(v - 1)]) {
        bad("order", "must be a permutation of 1.." + std::to_string(I));
      }
      seen[static_cast<std::size_t>(v - 1)] = true;
      order.push_back(static_cast<std::size_t>(v - 1));
    }
    if (order.size() != static_cast<std::size_t>(I)) {
      bad("order", "must be a permutation of 1.." + std::to_string(I));
    }
    return UpdateSchedule::permutation(std::move(order));
  }
  bad("schedule", "expected round_robin, first_mover or permutation, got '" + kind + "'");
}

DynamicsOptions Settings::dynamics(const MarketConfig& cfg) const {
  DynamicsOptions o;
  o.schedule = schedule(cfg.I());
  o.br_tol = number("br_tol", o.br_tol);
  if (!(o.br_tol > 0.0)) bad("br_tol", "must be positive");
  const long long rounds = integer("max_rounds", static_cast<long long>(o.max_rounds));
  if (rounds < 1) bad("max_rounds", "must be >= 1");
  o.max_rounds = static_cast<std::size_t>(rounds);
  o.tol_C = cfg.tol_C();
  return o;
}

std::vector<double> Settings::grid() const {
  const json& g = at("grid");
  if (!g.is_object()) return as_numbers(g, "grid");
  for (const char* k : {"from", "to", "count"}) {
    if (!g.contains(k)) bad("grid", std::string("range form needs '") + k + "'");
  }
  const double from = as_number(g["from"], "grid");
  const double to = as_number(g["to"], "grid");
  if (!g["count"].is_number_integer() || g["count"].get<long long>() < 1) {
    bad("grid", "'count' must be a positive integer");
  }
  const auto count = g["count"].get<std::size_t>();
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = count == 1 ? from
                        : from + (to - from) * static_cast<double>(k) /
                                     static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace oligosim
