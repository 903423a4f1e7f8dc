#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oligosim/cli.hpp"
#include "oligosim/errors.hpp"
#include "oracles.hpp"

using namespace oligosim;
using doctest::Approx;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_main(args, out, err);
  return {code, out.str(), err.str()};
}

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("oligosim_test_" + name);
}

}  // namespace

TEST_CASE("format_double uses 17 significant digits and round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  oracle::Gen g(61);
  for (int k = 0; k < 5000; ++k) {
    const double v = g.uniform(-1, 1) * std::pow(10.0, g.integer(-200, 200));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_double(format_double(HUGE_VAL)) == HUGE_VAL);
  CHECK_THROWS_AS(parse_double("1.5x"), InvalidParameter);
  CHECK_THROWS_AS(parse_double(""), InvalidParameter);
}

TEST_CASE("CSV writer and reader") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", "x"}, {"2.5", "y"}};
  std::ostringstream s;
  write_csv(s, t);
  CHECK(s.str() == "a,b\n1,x\n2.5,y\n");
  const auto back = parse(s.str());
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.number(1, "a") == 2.5);
  CHECK_THROWS_AS(back.column("c"), InvalidParameter);
  CHECK_THROWS_AS(parse("a,b\n1\n"), InvalidParameter);
  CHECK_THROWS_AS(parse(""), InvalidParameter);
}

TEST_CASE("table headers") {
  const auto cfg = MarketConfig::symmetric(1000, 2, 3000, 0.0);
  IntegrationOptions o;
  o.t_max = 0.05;
  const auto tr = integrate(PopulationState({0.3, 0.3}, 0.4), PriceProfile({1, 1}), cfg, o);
  const auto tt = trajectory_table(tr);
  CHECK(tt.header == std::vector<std::string>{"t", "x_1", "x_2", "x_0", "U_1", "U_2"});
  CHECK(tt.rows.size() == tr.states.size());
  const auto eq = best_response_dynamics(PriceProfile({3, 3}), cfg.alpha(), 1000);
  const auto et = trace_table(eq);
  CHECK(et.header ==
        std::vector<std::string>{"round", "operator", "old_price", "new_price", "potential", "region"});
  CHECK(et.rows.front()[1] == "1");
  const auto st = sweep_table(sweep(cfg, SweepParameter::W, {1000, 2000}));
  CHECK(st.header == std::vector<std::string>{"param_value", "alpha", "region", "lambda_star",
                                              "R_total", "U_agg", "J0", "x0"});
}

TEST_CASE("Settings: market keys") {
  Settings s(nlohmann::json{{"N", 1000}, {"I", 3}, {"W", 1500}, {"U0", 0.1}});
  const auto cfg = s.market();
  CHECK(cfg.I() == 3);
  CHECK(cfg.W() == std::vector<double>{1500, 1500, 1500});
  Settings list(nlohmann::json{{"N", 1000}, {"W", {1000, 2000}}});
  CHECK(list.market().I() == 2);
  Settings al(nlohmann::json{{"N", 1000}, {"I", 2}, {"alpha", 0.5}, {"U0", 0.2}});
  CHECK(al.market().alpha()[0] == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Settings: diagnostics name the key") {
  auto message = [](nlohmann::json j) -> std::string {
    try {
      Settings s(std::move(j));
      s.check_known_keys();
      s.market();
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message({{"N", 1000}, {"I", 2}, {"W", "big"}}).find("'W'") != std::string::npos);
  CHECK(message({{"N", 1000}, {"I", 2}}).find("'W'") != std::string::npos);
  CHECK(message({{"I", 2}, {"W", 10}}).find("'N'") != std::string::npos);
  CHECK(message({{"N", 1.5}, {"I", 2}, {"W", 10}}).find("'N'") != std::string::npos);
  CHECK(message({{"N", 1000}, {"I", 2}, {"W", 10}, {"U0", -1}}).find("U0") != std::string::npos);
  CHECK(message({{"N", 1000}, {"I", 2}, {"W", 10}, {"gama", 1}}).find("'gama'") != std::string::npos);
  CHECK(message({{"N", 1000}, {"I", 3}, {"W", {1, 2}}}).find("'I'") != std::string::npos);
  CHECK(message({{"N", 1000}, {"I", 2}, {"W", 10}, {"alpha", 1}}).find("'alpha'") != std::string::npos);
}

TEST_CASE("Settings: overrides parse JSON and fall back to strings") {
  Settings s;
  s.apply_override("N=1000");
  s.apply_override("W=[1000,2000]");
  s.apply_override("schedule=first_mover");
  s.apply_override("N=2000");
  CHECK(s.integer("N") == 2000);
  CHECK(s.numbers("W").size() == 2);
  CHECK(s.text("schedule", "") == "first_mover");
  CHECK_THROWS_AS(s.apply_override("novalue"), ConfigError);
  CHECK_THROWS_AS(s.apply_override("=3"), ConfigError);
}

TEST_CASE("Settings: grids and schedules") {
  Settings s(nlohmann::json{{"grid", {{"from", 1}, {"to", 2}, {"count", 5}}}});
  CHECK(s.grid() == std::vector<double>{1, 1.25, 1.5, 1.75, 2});
  Settings p(nlohmann::json{{"schedule", "permutation"}, {"order", {2, 1, 3}}});
  CHECK(p.schedule(3).order_for(3) == std::vector<std::size_t>{1, 0, 2});
  Settings bad(nlohmann::json{{"schedule", "permutation"}, {"order", {1, 1, 3}}});
  CHECK_THROWS_AS(bad.schedule(3), ConfigError);
  Settings f(nlohmann::json{{"schedule", "first_mover"}, {"first_mover", 2}});
  CHECK(f.schedule(3).order_for(3) == std::vector<std::size_t>{2, 0, 1});
  Settings u(nlohmann::json{{"schedule", "random"}});
  CHECK_THROWS_AS(u.schedule(3), ConfigError);
}

TEST_CASE("cli: stationary report") {
  const auto r = cli({"stationary", "--set", "N=1000", "--set", "I=3", "--set", "alpha=0.5",
                      "--set", "prices=1"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("case A ", 0) == 0);
  CHECK(r.out.find("x0=0.44818") != std::string::npos);
}

TEST_CASE("cli: simulate writes a parseable trajectory") {
  const auto r = cli({"simulate", "--set", "N=1000", "--set", "I=3", "--set", "alpha=0.5",
                      "--set", "prices=1", "--set", "record_stride=100"});
  REQUIRE(r.code == 0);
  const auto t = parse(r.out);
  CHECK(t.header.size() == 8);
  const auto last = t.rows.size() - 1;
  CHECK(std::abs(t.number(last, "x_0") - (1 - 1.5 / oracle::kE)) < 1e-5);
  CHECK(r.err.find("settled=true") != std::string::npos);
}

TEST_CASE("cli: equilibrium, sweep, find-parameter, best-response") {
  const auto e = cli({"equilibrium", "--set", "N=1000", "--set", "I=2", "--set", "alpha=20.085536923187668",
                      "--set", "prices=3.6931471805599454"});
  REQUIRE(e.code == 0);
  const auto t = parse(e.out);
  CHECK(t.number(0, "new_price") == Approx(3.0).epsilon(1e-12));
  CHECK(e.err.find("converged=true") != std::string::npos);

  const auto closed = cli({"equilibrium", "--set", "N=1000", "--set", "I=3", "--set", "alpha=0.5"});
  CHECK(closed.code == 0);
  CHECK(closed.err.find("prices=(1;1;1)") != std::string::npos);

  const auto s = cli({"sweep", "--set", "N=1000", "--set", "I=3", "--set", "W=1000", "--set", "U0=0.1",
                      "--set", "sweep_param=W", "--set", "grid=[500,1000,2000]"});
  REQUIRE(s.code == 0);
  CHECK(parse(s.out).rows.size() == 3);

  const auto f = cli({"find-parameter", "--set", "N=1000", "--set", "I=3", "--set", "W=1000",
                      "--set", "U0=0.1", "--set", "target=1500", "--set", "bracket=[100,4000]"});
  REQUIRE(f.code == 0);
  CHECK(f.out.rfind("W=1651.0", 0) == 0);

  const auto b = cli({"best-response", "--set", "N=1000", "--set", "I=2", "--set", "alpha=2.718281828459045",
                      "--set", "prices=1.1", "--set", "operator=1"});
  REQUIRE(b.code == 0);
  CHECK(b.out.find("branch=InteriorB") != std::string::npos);
  CHECK(b.out.find("price=1.60") != std::string::npos);
}

TEST_CASE("cli: ess-check needs prices or a seed") {
  const std::vector<std::string> base{"ess-check", "--set", "N=1000", "--set", "I=2",
                                      "--set", "alpha=20.085536923187668", "--set", "ess_t_max=2000",
                                      "--set", "ess_dt=0.05"};
  CHECK(cli(base).code == 2);
  auto seeded = base;
  seeded.insert(seeded.end(), {"--seed", "7"});
  const auto a = cli(seeded);
  const auto b = cli(seeded);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("stable=true") != std::string::npos);
}

TEST_CASE("cli: figures") {
  const auto f2 = parse(cli({"figure", "fig2"}).out);
  CHECK(f2.number(0, "new_price") == Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(f2.number(f2.rows.size() - 1, "new_price") - 2.0) < 1e-6);

  const auto up = parse(cli({"figure", "fig4-upper"}).out);
  CHECK(up.rows.size() == 60);
  for (std::size_t k = 0; k < up.rows.size(); ++k) {
    if (up.number(k, "alpha") < std::exp(1.5) / 3) CHECK(up.number(k, "U_agg") == 100.0);
  }
  const auto low = parse(cli({"figure", "fig4-lower"}).out);
  CHECK(low.rows.size() == 60);
  CHECK(low.number(10, "alpha") == Approx(0.55).epsilon(1e-12));
  CHECK(parse(cli({"figure", "fig1"}).out).rows.size() == 60);
  CHECK(parse(cli({"figure", "fig3"}).out).rows.size() == 90);
  CHECK(cli({"figure", "fig9"}).code == 2);
  CHECK(cli({"figure"}).code == 2);
}

TEST_CASE("cli: output files, config files and exit codes") {
  const auto cfg_path = temp_file("cfg.json");
  const auto out_path = temp_file("out.csv");
  {
    std::ofstream c(cfg_path);
    c << R"({"N": 1000, "I": 3, "W": 1000, "U0": 0.1, "sweep_param": "W", "grid": [500, 900]})";
  }
  const auto r = cli({"sweep", "--config", cfg_path.string(), "--out", out_path.string(),
                      "--set", "grid=[500,900,1300]"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out_path, std::ios::binary);
  const auto t = read_csv(in);
  CHECK(t.rows.size() == 3);  // the flag wins over the file

  CHECK(cli({"nonsense"}).code == 2);
  CHECK(cli({"sweep", "--config", "/nonexistent/cfg.json"}).code == 2);
  CHECK(cli({"stationary", "--set", "N=1000", "--set", "I=2", "--set", "W=10"}).code == 2);
  const auto bad = cli({"stationary", "--set", "N=1000", "--set", "I=2", "--set", "W=10",
                        "--set", "prices=1", "--set", "gamma=0"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("gamma") != std::string::npos);
  // unreachable target is a numerical failure
  CHECK(cli({"find-parameter", "--set", "N=1000", "--set", "I=3", "--set", "W=1000",
             "--set", "target=5000", "--set", "bracket=[100,4000]"})
            .code == 3);
  CHECK(cli({"sweep", "--set", "N=1000", "--set", "I=3", "--set", "W=1000", "--set", "grid=[1]",
             "--out", "/nonexistent/dir/x.csv"})
            .code == 2);
  std::filesystem::remove(cfg_path);
  std::filesystem::remove(out_path);
}

TEST_CASE("cli: repeated runs are byte-identical") {
  CHECK(cli({"figure", "fig4-upper"}).out == cli({"figure", "fig4-upper"}).out);
  CHECK(cli({"figure", "fig1"}).out == cli({"figure", "fig1"}).out);
}
