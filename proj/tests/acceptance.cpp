// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "conicwave/conicwave.hpp"

using namespace conicwave;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %-5s %-52s %s [%.1fs]\n", v.ok ? "PASS" : "FAIL", id.c_str(), title.c_str(), v.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!v.ok) ++failures;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

BCospherePoint reversed(const BCospherePoint& p) { return {p.component, p.x, p.y, -p.xi_bar, -p.eta_bar}; }

// J₀ by its power series; first zero by bisection
double j0_first_zero_by_series() {
  auto j0 = [](double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -0.25 * x * x / (static_cast<double>(k) * k);
      sum += term;
    }
    return sum;
  };
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (j0(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

// α = 2/3 trace at desk scale, shared by the conformance criteria
struct Pipeline {
  ConicModel model = ConicModel::spindle(Alpha::exact(2, 3));
  LengthSets sets;
  TraceSamples samples;
  SingularityReport report;
  double exponent_at(double t0) const { return scaling_exponent(samples, t0, report.params.window).exponent; }
};

const Pipeline& pipeline() {
  static const Pipeline p = [] {
    Pipeline q;
    const EigenTable table = spindle_modes(q.model.alpha_param(), 450.0);
    q.sets = length_sets(q.model, 13.0);
    q.samples = smoothed_wave_trace(table, uniform_grid(13.0, 0.005), eps_ladder(0.02, 0.2, 8));
    q.report = singularity_report(q.samples, q.sets);
    return q;
  }();
  return p;
}

}  // namespace

int main() {
  criterion("1", "sphere degeneration at alpha = 1", [] {
    const double cutoff = 450.0;
    const EigenTable t = spindle_modes(Alpha::exact(1, 1), cutoff);
    std::set<std::pair<int, int>> seen;
    std::map<long, long> mult;
    bool exact = true;
    for (const auto& e : t.entries) {
      const long l = e.m + e.k;
      exact = exact && e.lambda == static_cast<double>(l * (l + 1)) && e.mult == (e.m == 0 ? 1 : 2);
      exact = exact && seen.insert({e.m, e.k}).second;
      mult[l] += e.mult;
    }
    long l_max = 0;
    while ((l_max + 1) * (l_max + 2) <= cutoff * cutoff) ++l_max;
    bool complete = static_cast<long>(mult.size()) == l_max + 1;
    for (const auto& [l, n] : mult) complete = complete && n == 2 * l + 1;
    complete = complete && static_cast<long>(seen.size()) == (l_max + 1) * (l_max + 2) / 2;
    return Outcome{exact && complete, std::to_string(t.entries.size()) + " entries, levels 0.." +
                                          std::to_string(l_max) + " with multiplicity 2l+1"};
  });

  criterion("2", "closed-form spindle eigenvalues vs shooting", [] {
    double worst = 0.0;
    for (const auto& alpha : {Alpha::exact(2, 3), Alpha::exact(1, 1), Alpha::exact(3, 2)}) {
      const auto model = ConicModel::spindle(alpha);
      for (int m = 0; m <= 2; ++m) {
        const auto shot = oracle::shoot_radial_eigen(model, m, 20);
        if (shot.size() != 20) return Outcome{false, "shooting returned " + std::to_string(shot.size())};
        for (int j = 0; j < 20; ++j) {
          const double nu = m / alpha.value() + (m == 0 ? j + 1 : j);
          const double exact = nu * (nu + 1.0);
          worst = std::max(worst, std::abs(shot[j] - exact) / exact);
        }
      }
    }
    return Outcome{worst <= 1e-6, "max relative error " + fmt(worst, 3) + " (bound 1e-6)"};
  });

  criterion("3", "Bessel zeros: half-integer, j0 oracle, interlacing", [] {
    double worst_half = 0.0;
    for (int k = 1; k <= 100; ++k) worst_half = std::max(worst_half, std::abs(bessel::zero(0.5, k) - k * kPi));
    const double oracle = j0_first_zero_by_series();
    const double j01_err = std::abs(bessel::zero(0.0, 1) - oracle);
    const EigenTable t = flat_cone_modes(Alpha::exact(1, 2), 1.0, RimCondition::Dirichlet, 450.0);
    const bool inter = check_interlacing(t);
    return Outcome{worst_half <= 1e-12 && j01_err <= 1e-10 && inter,
                   "|j(1/2,k) - k pi| <= " + fmt(worst_half, 2) + ", |j(0,1) - oracle| = " + fmt(j01_err, 2) +
                       ", interlacing " + (inter ? "holds" : "broken") + " on " + std::to_string(t.entries.size()) +
                       " entries"};
  });

  criterion("4", "Weyl slope and heat coefficient at alpha = 2/3", [] {
    const double alpha = 2.0 / 3.0;
    const EigenTable t = spindle_modes(Alpha::exact(2, 3), 450.0);
    const WeylFit w = weyl_fit(t);
    const double heat = 1e-3 * heat_trace(t, 1e-3);
    const double heat_dev = std::abs(heat - alpha) / alpha;
    return Outcome{w.deviation <= 0.02 && heat_dev <= 0.02,
                   "slope " + fmt(w.slope, 6) + ", tau*heat " + fmt(heat, 6) + " (target " + fmt(alpha, 6) + ")"};
  });

  criterion("5", "flow engine: drift, exactness, reversal, escape", [] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double drift = 0.0, exact_err = 0.0, reversal = 0.0;
    for (const auto& alpha : {Alpha::exact(2, 3), Alpha::exact(1, 1), Alpha::exact(3, 2)}) {
      const auto m = ConicModel::spindle(alpha);
      for (int i = 0; i < 10; ++i) {
        const auto p = make_point(m, 0, 0.2 + 1.3 * u(rng), kTwoPi * u(rng), 0.3 + 2.5 * u(rng));
        const auto longrun = flow_interior(m, p, 100.0);
        drift = std::max(drift, longrun.max_constraint_defect);
        const auto r = flow_interior(m, p, 20.0);
        exact_err = std::max(exact_err, state_distance(m, r.end, flow_exact(m, p, 20.0)));
        const auto back = flow_interior(m, reversed(r.end), 20.0);
        reversal = std::max(reversal, state_distance(m, reversed(back.end), p));
      }
    }
    // escape estimate on the flat cone: x(t)² ≥ t²/2 − 2εt for t ∈ [t̄/4, t̄/2], start x < ε = t̄/8
    const auto flat = ConicModel::flat_cone(Alpha::exact(1, 2), 1.0);
    const double tbar = 0.2, eps = tbar / 8;
    FlowOptions opts;
    for (int k = 0; k <= 20; ++k) opts.sample_lengths.push_back(tbar / 4 + k * (tbar / 4) / 20);
    int violations = 0, sampled = 0;
    while (sampled < 1000) {
      const double heading = kTwoPi * u(rng);
      const auto p = make_point(flat, 0, eps * (1e-3 + 0.999 * u(rng)), kTwoPi * u(rng), heading);
      if (clairaut_constant(p) == 0.0) continue;
      const auto r = flow_interior(flat, p, tbar / 2 + 1e-9, opts);
      ++sampled;
      if (r.samples.size() != opts.sample_lengths.size()) ++violations;
      for (const auto& [t, q] : r.samples)
        if (q.x * q.x < t * t / 2 - 2 * eps * t) ++violations;
    }
    return Outcome{drift <= 1e-8 && exact_err <= 1e-6 && reversal <= 1e-6 && violations == 0,
                   "drift/100 " + fmt(drift, 2) + ", vs exact " + fmt(exact_err, 2) + ", reversal " +
                       fmt(reversal, 2) + ", escape violations " + std::to_string(violations) + "/1000"};
  });

  criterion("6", "near-pole phi-advance tends to pi/alpha", [] {
    const auto m = ConicModel::spindle(Alpha::exact(2, 3));
    const double limit = kPi / m.alpha();
    double prev = INFINITY, err = 0.0;
    bool monotone = true;
    std::string trail;
    for (double b : {1e-1, 1e-2, 1e-3, 1e-4}) {
      err = std::abs(polar_passage_advance(m, b) - limit);
      monotone = monotone && err < prev;
      prev = err;
      trail += (trail.empty() ? "" : ", ") + fmt(err, 2);
    }
    return Outcome{err <= 1e-2 && monotone, "error at b = 1e-1..1e-4: " + trail};
  });

  criterion("7", "length sets and closure-search confirmation", [] {
    const auto m = ConicModel::spindle(Alpha::exact(2, 3));
    const auto sets = length_sets(m, 13.0);
    const std::vector<double> dif_want = {4 * kPi / 3, 2 * kPi, 8 * kPi / 3, 4 * kPi};
    const std::vector<double> geo_want = {4 * kPi / 3, 8 * kPi / 3, 4 * kPi};
    auto same = [](const std::vector<double>& a, const std::vector<double>& b, double tol) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
      return true;
    };
    bool ok = same(lengths_of(sets.dif), dif_want, 1e-12) && same(lengths_of(sets.geo), geo_want, 1e-12);
    const auto found = oracle::distinct_lengths(oracle::closure_search(m, 13.0));
    ok = ok && same(found, dif_want, 1e-6);
    bool subset = true;
    for (const auto& alpha : {Alpha::exact(2, 3), Alpha::exact(1, 1), Alpha::exact(3, 2),
                              Alpha::decimal(1.0 / std::sqrt(2.0))}) {
      const auto s = length_sets(ConicModel::spindle(alpha), 30.0);
      const auto dif = lengths_of(s.dif);
      for (double g : lengths_of(s.geo)) subset = subset && std::find(dif.begin(), dif.end(), g) != dif.end();
    }
    return Outcome{ok && subset, std::string("Dif/Geo as predicted, closure search ") +
                                     (same(found, dif_want, 1e-6) ? "confirms" : "disagrees") +
                                     ", Geo subset of Dif " + (subset ? "holds" : "fails")};
  });

  criterion("8(a)", "singular times in Dif and every Dif time detected", [] {
    const auto& p = pipeline();
    std::string found, missed;
    for (const auto& e : p.report.entries)
      if (e.detected) found += (found.empty() ? "" : " ") + fmt(e.t0, 6);
    for (double l : lengths_of(p.sets.dif)) {
      bool hit = false;
      for (const auto& e : p.report.entries)
        if (e.detected && std::abs(e.t0 - l) <= p.report.params.match_tol) hit = true;
      if (!hit) missed += (missed.empty() ? "" : " ") + fmt(l, 6) + " (a = " + fmt(p.exponent_at(l), 3) + ")";
    }
    return Outcome{p.report.no_singularity_off_dif && p.report.all_dif_detected,
                   "detected {" + found + "}" + (missed.empty() ? "" : ", undetected " + missed)};
  });

  criterion("8(b)", "a(0) = 2.0 +- 0.1", [] {
    const double a0 = pipeline().exponent_at(0.0);
    return Outcome{std::abs(a0 - 2.0) <= 0.1, "a(0) = " + fmt(a0)};
  });

  criterion("8(c)", "a(2 pi) <= 1.2", [] {
    const double a = pipeline().exponent_at(2 * kPi);
    return Outcome{a <= 1.2, "a(2 pi) = " + fmt(a)};
  });

  criterion("8(d)", "a(2 pi) below a(4 pi/3) - 0.3 and a(4 pi) - 0.5", [] {
    const auto& p = pipeline();
    const double a2 = p.exponent_at(2 * kPi), a43 = p.exponent_at(4 * kPi / 3), a4 = p.exponent_at(4 * kPi);
    return Outcome{a2 < a43 - 0.3 && a2 < a4 - 0.5,
                   "a(2 pi) = " + fmt(a2) + ", a(4 pi/3) = " + fmt(a43) + ", a(4 pi) = " + fmt(a4)};
  });

  criterion("8(e)", "a(5.0) <= 0.3", [] {
    const double a = pipeline().exponent_at(5.0);
    return Outcome{a <= 0.3, "a(5.0) = " + fmt(a)};
  });

  criterion("9", "estimator calibration and trace determinism", [] {
    // comb λ = (kπ)², k ∈ ℤ
    EigenTable comb;
    comb.cutoff = 200 * kPi;
    for (int k = 0; k <= 200; ++k) comb.entries.push_back({0, k, k * kPi, k * kPi * k * kPi, k == 0 ? 1 : 2});
    const auto cs = smoothed_wave_trace(comb, uniform_grid(4.0, 0.002), eps_ladder(8.0 / comb.cutoff, 0.2, 8));
    const double a_comb = scaling_exponent(cs, 2.0, 0.05).exponent;

    EigenTable single;
    single.cutoff = 1e3;
    single.entries.push_back({0, 0, 1.0, 1.0, 1});
    const auto grid = uniform_grid(20.0, 0.01);
    const std::vector<double> eps = {0.02, 0.1, 0.5};
    const auto ss = smoothed_wave_trace(single, grid, eps);
    double single_err = 0.0;
    for (std::size_t e = 0; e < eps.size(); ++e)
      for (std::size_t i = 0; i < grid.size(); ++i)
        single_err = std::max(single_err,
                              std::abs(ss.values[e][i] - std::exp(-eps[e] * eps[e] / 2) * std::cos(grid[i])));

    const auto table = spindle_modes(Alpha::exact(2, 3), 450.0);
    std::vector<double> t, neg;
    for (double x = 0.0; x <= 13.0; x += 0.37) {
      t.push_back(x);
      neg.push_back(-x);
    }
    const auto ladder = eps_ladder(0.02, 0.2, 8);
    const auto pos_s = smoothed_wave_trace(table, t, ladder);
    const auto neg_s = smoothed_wave_trace(table, neg, ladder);
    double even_err = 0.0;
    for (std::size_t e = 0; e < ladder.size(); ++e)
      for (std::size_t i = 0; i < t.size(); ++i)
        even_err = std::max(even_err, std::abs(pos_s.values[e][i] - neg_s.values[e][i]));

    const auto rerun = csv::trace(smoothed_wave_trace(table, t, ladder, 1));
    const bool identical = csv::trace(pos_s) == rerun && csv::trace(cs) == csv::trace(smoothed_wave_trace(
                                                                              comb, cs.t, cs.eps, 1));
    return Outcome{std::abs(a_comb - 1.0) <= 0.05 && single_err <= 1e-12 && even_err <= 1e-12 && identical,
                   "comb a(2) = " + fmt(a_comb) + ", single-mode err " + fmt(single_err, 2) + ", evenness " +
                       fmt(even_err, 2) + ", reruns " + (identical ? "bit-identical" : "differ")};
  });

  std::printf("%s: %d criterion line(s) failed\n", failures == 0 ? "ALL PASS" : "NOT ALL PASS", failures);
  return failures == 0 ? 0 : 1;
}
