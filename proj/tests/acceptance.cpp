// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "oligosim/dynamics.hpp"
#include "oligosim/pricing.hpp"
#include "oligosim/regulation.hpp"
#include "oligosim/stability.hpp"
#include "oligosim/stationary.hpp"
#include "oracles.hpp"

#ifndef OLIGOSIM_CLI_PATH
#error "OLIGOSIM_CLI_PATH must point at the oligosim executable"
#endif

using namespace oligosim;

namespace {

const double kE = oracle::kE;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. closed-form equilibria on every alpha region
Outcome table_ii() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(1001);
  double worst = 0.0;
  int checked = 0;
  for (int I : {2, 3, 5}) {
    const double n = I, N = 1000;
    const double a1 = kE / n, a3 = std::exp(n / (n - 1)) / n;
    for (int region = 0; region < 3; ++region) {
      for (int k = 0; k < 20; ++k) {
        double alpha, lam, rev;
        if (region == 0) {
          alpha = a1 * g.uniform(0.001, 0.999);
          lam = 1.0;
          rev = alpha * N / kE;
        } else if (region == 1) {
          alpha = a1 + (a3 - a1) * g.uniform(0.0, 1.0);
          lam = std::log(n * alpha);
          rev = N * std::log(n * alpha) / n;
        } else {
          alpha = a3 * g.log_uniform(1.001, 1e3);
          lam = n / (n - 1);
          rev = N / (n - 1);
        }
        const auto ne = symmetric_ne(alpha, I, 1000);
        for (std::size_t i = 0; i < ne.prices.size(); ++i) {
          worst = std::max({worst, rel_err(ne.prices[i], lam), rel_err(ne.revenues[i], rev)});
        }
        ++checked;
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst <= 1e-9 && secs < 1.0 && checked == 180;
  o.detail = std::to_string(checked) + " instances, max rel err " + fmt("%.2e", worst) +
             ", " + fmt("%.3f", secs) + " s";
  return o;
}

// 2. regulator anchors for I = 3, N = 1000
Outcome regulator_anchors() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const double edge = std::exp(1.5) / 3;

  // (a) U0 = 0.1, alpha below the A3 edge
  const auto up = MarketConfig::symmetric(1000, 3, 1000, 0.1);
  std::vector<double> grid;
  for (int k = 1; k <= 400; ++k) {
    const double a = edge * k / 401.0;
    grid.push_back(a * 1000 * std::exp(0.1));
  }
  bool a_ok = true;
  for (const auto& r : sweep(up, SweepParameter::W, grid).reports) {
    a_ok = a_ok && r.alpha < edge && r.U_agg == 100.0;
  }

  // (b) tune W until the total revenue reaches 1500
  const double W = find_parameter(up, SweepParameter::W, Objective::TotalRevenue, 1500, 100, 5000);
  const bool b_ok = std::abs(W - 1657.8) <= 0.5;

  // (c) W = 5000, tune U0 until the total revenue reaches 1500
  const auto low = MarketConfig::symmetric(1000, 3, 5000, 0.1);
  const double U0 = find_parameter(low, SweepParameter::U0, Objective::TotalRevenue, 1500, 0.0, 5.0);
  const double Uagg = aggregate_utility(5000, 1000, 3, U0);
  const bool c_ok = std::abs(U0 - 1.204) <= 0.001 && std::abs(Uagg - 1204) <= 1.0;

  const double secs = seconds_since(t0);
  o.pass = a_ok && b_ok && c_ok && secs < 1.0;
  o.detail = std::string("(a) ") + (a_ok ? "ok" : "FAIL") + " U_agg=100 on 400 points; (b) " +
             (b_ok ? "ok" : "FAIL") + " W=" + fmt("%.3f", W) + " want 1657.8+-0.5; (c) " +
             (c_ok ? "ok" : "FAIL") + " U0=" + fmt("%.5f", U0) + " want 1.204+-0.001, U_agg=" +
             fmt("%.2f", Uagg) + " want 1204+-1; " + fmt("%.3f", secs) + " s";
  return o;
}

// 3. two-operator best response run at alpha = e^3
Outcome figure2_dynamics() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e3 = std::exp(3.0);
  const auto r = best_response_dynamics(PriceProfile::uniform(3 + std::log(2.0), 2),
                                        AlphaProfile::uniform(e3, 2), 1000);
  const double secs = seconds_since(t0);
  Outcome o;
  const double first = r.trace.at(0).new_price, second = r.trace.at(1).new_price;
  bool mono = true;
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    mono = mono && r.trace[k].potential >= r.trace[k - 1].potential - 1e-12;
  }
  const double dist = std::max(std::abs(r.prices[0] - 2), std::abs(r.prices[1] - 2));
  o.pass = std::abs(first - 3) <= 0.01 && std::abs(second - 2.556) <= 0.06 && r.converged &&
           dist <= 1e-6 && r.rounds <= 50 && mono && secs < 0.1;
  o.detail = "first " + fmt("%.6f", first) + ", second " + fmt("%.6f", second) + ", final dist " +
             fmt("%.1e", dist) + " after " + std::to_string(r.rounds) + " rounds, potential " +
             (mono ? "nondecreasing" : "DECREASED") + ", " + fmt("%.4f", secs) + " s";
  return o;
}

// 4. integrated trajectories end at the closed-form stationary point
Outcome ode_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(1004);
  double worst_dist = 0, worst_defect = 0;
  int runs = 0, settled = 0;
  for (int region = 0; region < 3; ++region) {
    for (int k = 0; k < 100; ++k) {
      const auto I = static_cast<std::size_t>(g.integer(2, 4));
      std::vector<double> alpha = g.vec(I, 0.2, 5.0);
      const double target = region == 0 ? g.uniform(0.2, 0.9)
                            : region == 1 ? g.uniform(1.1, 5.0)
                                          : 1.0;
      double total = 0;
      for (double a : alpha) total += a;
      if (total < 1.2 * target) {
        for (double& a : alpha) a *= 1.2 * target / total;
      }
      std::vector<double> lam;
      do {
        lam = g.vec(I, 0.0, 3.0);
        const double shift = std::log(oracle::S(alpha, lam) / target);
        for (double& v : lam) v += shift;
      } while (*std::min_element(lam.begin(), lam.end()) < 0.0);
      const double U0 = g.uniform(0.0, 1.0);
      std::vector<double> W;
      for (double a : alpha) W.push_back(a * 1000 * std::exp(U0));
      const MarketConfig cfg(1000, W, U0);
      const PriceProfile p(lam);
      const auto point = stationary_point(p, cfg);

      // fine steps through the transient, then coarse steps for the slow
      // approach (x_0 decays like 1/t on the C boundary)
      IntegrationOptions fine;
      fine.dt = 0.01;
      fine.t_max = 100;
      fine.settle_tol = 1e-11;
      fine.record_stride = 1u << 30;
      auto tr = integrate(PopulationState::from_packed(g.simplex(I + 1, 1e-3)), p, cfg, fine);
      worst_defect = std::max(worst_defect, tr.max_simplex_defect);
      if (!tr.settled) {
        IntegrationOptions coarse = fine;
        coarse.dt = region == 2 ? 0.5 : 0.1;
        coarse.t_max = region == 2 ? 1e6 : 1e5;
        tr = integrate(tr.final_state(), p, cfg, coarse);
        worst_defect = std::max(worst_defect, tr.max_simplex_defect);
      }
      worst_dist = std::max(worst_dist, max_norm_distance(tr.final_state(), point.state));
      worst_defect = std::max(worst_defect, tr.max_simplex_defect);
      settled += tr.settled ? 1 : 0;
      ++runs;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_dist < 1e-5 && worst_defect < 1e-9 && secs < 60.0;
  o.detail = std::to_string(runs) + " runs (" + std::to_string(settled) + " settled), max dist " +
             fmt("%.2e", worst_dist) + ", max simplex defect " + fmt("%.2e", worst_defect) + ", " +
             fmt("%.2f", secs) + " s";
  return o;
}

int sign_band(double v) { return std::abs(v) < 1e-12 ? 0 : (v > 0 ? 1 : -1); }

// 5. potential changes have the sign of the deviator's revenue change
Outcome ordinal_potential() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(1005);
  int mismatches = 0;
  int per_region[3] = {0, 0, 0};
  for (int k = 0; k < 10000; ++k) {
    const auto I = static_cast<std::size_t>(g.integer(2, 5));
    auto av = g.vec(I, 0.05, 8.0);
    // a third of the starting profiles are placed on the S = 1 boundary
    if (k % 3 == 0) {
      double total = 0;
      for (double a : av) total += a;
      if (total < 2.0) {
        for (double& a : av) a *= 2.0 / total;
      }
    }
    const auto al = AlphaProfile::from(av);
    std::vector<double> l;
    do {
      l = g.vec(I, 0.05, 6.0);
      if (k % 3 == 0) {
        const double shift = std::log(oracle::S(al.values, l));
        for (double& v : l) v += shift;
      }
    } while (*std::min_element(l.begin(), l.end()) < 0.05);
    const auto i = static_cast<std::size_t>(g.integer(0, static_cast<int>(I) - 1));
    auto l2 = l;
    l2[i] = g.uniform(0.05, 6.0);
    const PriceProfile p(l), q(l2);
    ++per_region[static_cast<int>(classify(p, al).region)];
    const double dP = potential(q, al) - potential(p, al);
    const double dR = oracle::revenue(i, al.values, l2, 1.0) - oracle::revenue(i, al.values, l, 1.0);
    if (sign_band(dP) != sign_band(dR)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = mismatches == 0 && secs < 5.0;
  o.detail = "10000 deviations (A " + std::to_string(per_region[0]) + ", B " +
             std::to_string(per_region[1]) + ", C " + std::to_string(per_region[2]) + "), " +
             std::to_string(mismatches) + " sign mismatches, " + fmt("%.3f", secs) + " s";
  return o;
}

// 6. mu* residual, bracket and bisection agreement
Outcome mu_star_check() {
  oracle::Gen g(1006);
  double worst_res = 0, worst_diff = 0;
  int bracket_fail = 0;
  for (int k = 0; k < 10000; ++k) {
    const int I = g.integer(2, 6);
    const double alpha = g.log_uniform(0.05, 25.0);
    const auto al = AlphaProfile::uniform(alpha, static_cast<std::size_t>(I));
    const auto others = g.vec(static_cast<std::size_t>(I - 1), 0.0, 5.0);
    double inv = 0, rival = 0;
    for (double v : others) {
      inv += std::exp(-v);
      rival += alpha * std::exp(-v);
    }
    const double c = alpha / rival;
    const double h = std::log((I - 1) / inv);  // log of the harmonic mean of e^{lambda_j}
    const double mu = mu_star(0, others, al);
    const double lo = std::min(I / (I - 1.0), h), hi = std::max(I / (I - 1.0), h);
    if (!(mu >= lo - 1e-12 && mu <= hi + 1e-12)) ++bracket_fail;
    worst_res = std::max(worst_res, std::abs(std::exp(mu) * (mu - 1) - c));
    worst_diff = std::max(worst_diff, std::abs(mu - oracle::mu_bisect(c)));
  }
  Outcome o;
  o.pass = worst_res < 1e-10 && bracket_fail == 0 && worst_diff <= 1e-9;
  o.detail = "10000 solves, max residual " + fmt("%.2e", worst_res) + ", bracket failures " +
             std::to_string(bracket_fail) + ", max |mu - bisection| " + fmt("%.2e", worst_diff);
  return o;
}

// 7. revenue continuity at l0 and best response branch exclusivity
Outcome continuity_exclusivity() {
  oracle::Gen g(1007);
  double worst = 0;
  int both = 0, done = 0;
  while (done < 10000) {
    const auto I = static_cast<std::size_t>(g.integer(2, 6));
    const auto al = AlphaProfile::from(g.vec(I, 0.05, 10.0));
    const auto others = g.vec(I - 1, 0.0, 6.0);
    const double m = rival_mass(0, others, al);
    const double mu = mu_star(0, others, al);
    const bool in_A = al[0] / kE + m < 1.0;
    const bool in_B = al[0] * std::exp(-mu) + m > 1.0;
    if (in_A && in_B) ++both;
    const double b = l0(0, others, al);
    if (!std::isfinite(b)) continue;
    const double rA = revenue_unsaturated(al[0], b, 1000);
    const double rB = revenue_saturated(al[0], b, m, 1000);
    worst = std::max(worst, std::abs(rA - rB));
    ++done;
  }
  Outcome o;
  o.pass = worst < 1e-9 && both == 0;
  o.detail = "10000 instances, max |R_A(l0) - R_B(l0)| " + fmt("%.2e", worst) +
             ", both branches feasible " + std::to_string(both) + " times";
  return o;
}

// 8. perturbation stability of one equilibrium point per case
Outcome ess() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(1008);
  Outcome o;
  const int I = 3;
  const double n = I;
  const double a1 = kE / n, a3 = std::exp(n / (n - 1)) / n;
  const struct {
    Region want;
    double alpha;
  } cases[] = {{Region::A, a1 * g.uniform(0.2, 0.9)},
               {Region::B, a3 * g.uniform(1.5, 10.0)},
               {Region::C, g.uniform(a1 * 1.1, a3 * 0.9)}};
  for (const auto& c : cases) {
    const double U0 = g.uniform(0.0, 1.0);
    const auto cfg = MarketConfig::symmetric(1000, I, c.alpha * 1000 * std::exp(U0), U0);
    const auto ne = symmetric_ne(cfg.alpha(), 1000);
    const auto point = stationary_point(ne.prices, cfg);
    const bool label_ok = point.case_label == c.want;
    const bool stable = ess_perturb_check(point, ne.prices, cfg, 1e-3);
    o.pass = o.pass && label_ok && stable;
    o.detail += std::string(to_string(point.case_label)) + " (alpha " + fmt("%.4f", c.alpha) +
                ") " + (stable ? "stable" : "NOT stable") + "; ";
  }
  o.detail += fmt("%.2f", seconds_since(t0)) + " s";
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// 9. the CLI writes identical bytes on repeated runs
Outcome determinism() {
  const std::string exe = OLIGOSIM_CLI_PATH;
  const std::string a = "acceptance_fig4_upper_1.csv", b = "acceptance_fig4_upper_2.csv";
  Outcome o;
  for (const auto& f : {a, b}) {
    const std::string cmd = "\"" + exe + "\" figure fig4-upper --out " + f;
    if (std::system(cmd.c_str()) != 0) {
      o.pass = false;
      o.detail = "command failed: " + cmd;
      return o;
    }
  }
  const std::string x = slurp(a), y = slurp(b);
  o.pass = !x.empty() && x == y;
  o.detail = std::to_string(x.size()) + " and " + std::to_string(y.size()) + " bytes, " +
             (x == y ? "identical" : "DIFFERENT");
  std::remove(a.c_str());
  std::remove(b.c_str());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {
      table_ii, regulator_anchors, figure2_dynamics, ode_equivalence, ordinal_potential,
      mu_star_check, continuity_exclusivity, ess, determinism};
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--criterion" && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
