#include "oligosim/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "oligosim/errors.hpp"
#include "oligosim/pricing.hpp"
#include "oligosim/regulation.hpp"
#include "oligosim/stability.hpp"
#include "oligosim/stationary.hpp"

namespace oligosim {

namespace {

constexpr std::string_view kCommands[] = {
    "simulate", "stationary",     "best-response", "equilibrium",
    "sweep",    "find-parameter", "figure",        "ess-check"};

std::string list(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ';';
    s += format_double(v[k]);
  }
  return s + ")";
}

std::vector<double> alpha_grid(int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) g[static_cast<std::size_t>(k - 1)] = 0.05 * k;
  return g;
}

MarketConfig duopoly(double alpha) {
  return MarketConfig::symmetric(1000, 2, alpha * 1000.0, 0.0);
}

CsvTable fig1() {
  const MarketConfig cfg = duopoly(std::numbers::e);
  DynamicsOptions dyn;
  dyn.schedule = UpdateSchedule::first_mover(0);
  CsvTable t;
  t.header = {"lambda1_0", "lambda_1", "lambda_2", "R_1", "R_2", "region"};
  for (double l : alpha_grid(60)) {
    const auto res = best_response_dynamics(PriceProfile::uniform(l, 2), cfg.alpha(),
                                            cfg.N(), dyn);
    t.rows.push_back({format_double(l), format_double(res.prices[0]),
                      format_double(res.prices[1]), format_double(res.revenues[0]),
                      format_double(res.revenues[1]),
                      std::string(to_string(res.region.region))});
  }
  return t;
}

CsvTable fig2() {
  const double alpha = std::exp(3.0);
  const MarketConfig cfg = duopoly(alpha);
  const auto res = best_response_dynamics(
      PriceProfile::uniform(std::log(2.0 * alpha), 2), cfg.alpha(), cfg.N());
  return trace_table(res);
}

CsvTable fig3() {
  DynamicsOptions dyn;
  dyn.schedule = UpdateSchedule::first_mover(0);
  CsvTable t;
  t.header = {"alpha", "region", "R_symmetric", "lambda_1", "lambda_2", "R_1", "R_2"};
  for (double a : alpha_grid(90)) {
    const MarketConfig cfg = duopoly(a);
    const auto ne = symmetric_ne(a, 2, cfg.N());
    const auto res = best_response_dynamics(PriceProfile::uniform(1.1, 2), cfg.alpha(),
                                            cfg.N(), dyn);
    t.rows.push_back({format_double(a), std::string(to_string(alpha_region(a, 2))),
                      format_double(ne.revenues[0]), format_double(res.prices[0]),
                      format_double(res.prices[1]), format_double(res.revenues[0]),
                      format_double(res.revenues[1])});
  }
  return t;
}

CsvTable fig4(bool upper) {
  const std::vector<double> alphas = alpha_grid(60);
  std::vector<double> grid;
  if (upper) {
    const MarketConfig base = MarketConfig::symmetric(1000, 3, 1000.0, 0.1);
    for (double a : alphas) grid.push_back(a * 1000.0 * std::exp(0.1));
    return sweep_table(sweep(base, SweepParameter::W, grid));
  }
  const MarketConfig base = MarketConfig::symmetric(1000, 3, 5000.0, 0.0);
  for (double a : alphas) grid.push_back(std::log(5.0 / a));
  return sweep_table(sweep(base, SweepParameter::U0, grid));
}

std::string emit(const CsvTable& t) {
  std::ostringstream s;
  write_csv(s, t);
  return s.str();
}

std::string stationary_report(const Settings& st) {
  const MarketConfig cfg = st.market();
  const PriceProfile prices = st.prices(cfg);
  const StationaryPoint p = stationary_point(prices, cfg);
  std::string line = "case " + std::string(to_string(p.case_label)) +
                     " S=" + format_double(p.S) + " x0=" + format_double(p.state.x0) +
                     " x=" + list(p.state.x) + " U=" + list(p.utilities) +
                     " U0=" + format_double(p.U0);
  return line + "\n";
}

std::string best_response_report(const Settings& st) {
  const MarketConfig cfg = st.market();
  const PriceProfile prices = st.prices(cfg);
  std::size_t first = 0;
  std::size_t last = prices.size();
  if (st.has("operator")) {
    const long long k = st.integer("operator");
    if (k < 1 || k > cfg.I()) {
      throw ConfigError("config key 'operator': must be in 1.." + std::to_string(cfg.I()));
    }
    first = static_cast<std::size_t>(k - 1);
    last = first + 1;
  }
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    const auto others = rival_prices(prices, i);
    const auto br = best_response(i, others, cfg.alpha());
    PriceProfile moved = prices;
    moved.lambda[i] = std::min(br.price, cfg.lambda_max());
    out += "operator " + std::to_string(i + 1) + " price=" + format_double(br.price) +
           " branch=" + std::string(to_string(br.branch)) +
           " mu_star=" + format_double(br.mu_star) + " l0=" + format_double(br.l0) +
           " revenue=" + format_double(revenue(i, moved, cfg.alpha(), cfg.N())) + "\n";
  }
  return out;
}

std::string equilibrium_summary(const EquilibriumResult& r) {
  return "region " + std::string(to_string(r.region.region)) +
         " S=" + format_double(r.region.S) + " prices=" + list(r.prices.lambda) +
         " revenues=" + list(r.revenues) + " rounds=" + std::to_string(r.rounds) +
         " converged=" + (r.converged ? "true" : "false") +
         " unique=" + (r.unique ? "true" : "false") + "\n";
}

ReportOptions report_options(const Settings& st, const MarketConfig& cfg) {
  ReportOptions o;
  o.displayed_j0 = st.flag("displayed_j0", false);
  if (st.has("dynamics_start")) {
    std::vector<double> start = st.numbers("dynamics_start");
    if (start.size() == 1) start.assign(static_cast<std::size_t>(cfg.I()), start.front());
    o.dynamics_start = std::move(start);
  }
  o.schedule = st.schedule(cfg.I());
  return o;
}

struct Output {
  std::string data;
  std::string summary;
};

Output execute(const RunSpec& spec) {
  const Settings& st = spec.settings;
  const std::string& cmd = spec.command;
  if (cmd == "figure") return {emit(figure_table(spec.figure)), ""};

  st.check_known_keys();
  if (cmd == "stationary") return {stationary_report(st), ""};
  if (cmd == "best-response") return {best_response_report(st), ""};

  const MarketConfig cfg = st.market();
  if (cmd == "simulate") {
    const Trajectory tr =
        integrate(st.initial_state(cfg), st.prices(cfg), cfg, st.integration());
    const auto& last = tr.final_state();
    return {emit(trajectory_table(tr)),
            "settled=" + std::string(tr.settled ? "true" : "false") +
                " steps=" + std::to_string(tr.steps) + " x=" + list(last.x) +
                " x0=" + format_double(last.x0) +
                " max_simplex_defect=" + format_double(tr.max_simplex_defect) + "\n"};
  }
  if (cmd == "equilibrium") {
    const EquilibriumResult r =
        st.has("prices")
            ? best_response_dynamics(st.prices(cfg), cfg.alpha(), cfg.N(), st.dynamics(cfg))
            : symmetric_ne(cfg.alpha(), cfg.N());
    return {emit(trace_table(r)), equilibrium_summary(r)};
  }
  if (cmd == "sweep") {
    const SweepParameter p = parse_sweep_parameter(st.text("sweep_param", "alpha"));
    return {emit(sweep_table(sweep(cfg, p, st.grid(), report_options(st, cfg)))), ""};
  }
  if (cmd == "find-parameter") {
    const SweepParameter p = parse_sweep_parameter(st.text("sweep_param", "W"));
    const Objective obj = parse_objective(st.text("objective", "total_revenue"));
    const std::vector<double> b = st.numbers("bracket");
    if (b.size() != 2) throw ConfigError("config key 'bracket': expected [lo, hi]");
    const double v = find_parameter(cfg, p, obj, st.number("target"), b[0], b[1],
                                    st.number("find_tol", 1e-9));
    const EfficiencyReport rep = efficiency_report(apply_parameter(cfg, p, v));
    return {std::string(to_string(p)) + "=" + format_double(v) +
                " alpha=" + format_double(rep.alpha) +
                " R_total=" + format_double(rep.R_total) +
                " U_agg=" + format_double(rep.U_agg) + "\n",
            ""};
  }
  if (cmd == "ess-check") {
    PriceProfile prices;
    if (st.has("prices")) {
      prices = st.prices(cfg);
    } else if (spec.seed) {
      std::mt19937_64 rng(*spec.seed);
      std::uniform_real_distribution<double> u(0.5, 3.0);
      std::vector<double> l(static_cast<std::size_t>(cfg.I()));
      for (double& v : l) v = u(rng);
      prices = PriceProfile(std::move(l), cfg.lambda_max());
    } else {
      throw ConfigError("missing config key 'prices' (or pass --seed to draw them)");
    }
    EssOptions eo;
    eo.dt = st.number("ess_dt", eo.dt);
    eo.t_max = st.number("ess_t_max", eo.t_max);
    const double eps = st.number("eps", 1e-3);
    const StationaryPoint point = stationary_point(prices, cfg);
    const auto outcomes = ess_perturbations(point, prices, cfg, eps, eo);
    bool stable = true;
    std::string out = "case " + std::string(to_string(point.case_label)) +
                      " prices=" + list(prices.lambda) + "\n";
    const auto I = static_cast<std::size_t>(cfg.I());
    auto label = [I](std::size_t s) { return std::to_string(s == I ? 0 : s + 1); };
    for (const auto& o : outcomes) {
      stable = stable && o.returned;
      out += "from=" + label(o.from) + " to=" + label(o.to) +
             " returned=" + (o.returned ? "true" : "false") +
             " time=" + format_double(o.return_time) +
             " distance=" + format_double(o.final_distance) + "\n";
    }
    out += std::string("stable=") + (stable ? "true" : "false") + "\n";
    return {out, ""};
  }
  throw ConfigError("unknown command '" + cmd + "'");
}

}  // namespace

CsvTable figure_table(std::string_view id) {
  if (id == "fig1") return fig1();
  if (id == "fig2") return fig2();
  if (id == "fig3") return fig3();
  if (id == "fig4-upper") return fig4(true);
  if (id == "fig4-lower") return fig4(false);
  throw ConfigError("unknown figure '" + std::string(id) +
                    "' (expected fig1, fig2, fig3, fig4-upper or fig4-lower)");
}

RunSpec parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"Oligopoly spectrum market simulator", "oligosim"};
  std::string command;
  std::string figure;
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  app.add_option("command", command, "Command to run")->required();
  app.add_option("figure", figure, "Figure id for the figure command");
  auto* config_opt = app.add_option("--config", config, "JSON config file");
  auto* out_opt = app.add_option("--out", out, "Output file (default stdout)");
  app.add_option("--set", sets, "Override key=value (value parsed as JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (ess-check only)");

  std::vector<const char*> argv;
  argv.push_back("oligosim");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw ConfigError(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("command line: ") + e.what());
  }

  bool known = false;
  for (auto c : kCommands) known = known || command == c;
  if (!known) throw ConfigError("unknown command '" + command + "'");
  if (command == "figure" && figure.empty()) {
    throw ConfigError("figure needs an id (fig1, fig2, fig3, fig4-upper, fig4-lower)");
  }
  if (command != "figure" && !figure.empty()) {
    throw ConfigError("unexpected argument '" + figure + "'");
  }

  RunSpec spec;
  spec.command = command;
  spec.figure = figure;
  if (*config_opt) spec.settings = Settings::load(config);
  for (const auto& s : sets) spec.settings.apply_override(s);
  if (*out_opt) spec.out = out;
  if (*seed_opt) spec.seed = seed;
  return spec;
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const Output o = execute(spec);
    if (spec.out) {
      std::ofstream f(*spec.out, std::ios::binary | std::ios::trunc);
      if (!f) throw ConfigError("cannot write output file " + *spec.out);
      f << o.data;
      if (!f.flush()) throw ConfigError("cannot write output file " + *spec.out);
    } else {
      out << o.data;
    }
    err << o.summary;
    return kExitOk;
  } catch (const InvalidParameter& e) {
    err << "oligosim: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "oligosim: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  RunSpec spec;
  try {
    spec = parse_command_line(args);
  } catch (const InvalidParameter& e) {
    err << "oligosim: " << e.what() << "\n";
    return kExitConfig;
  }
  return run(spec, out, err);
}

}  // namespace oligosim
