#pragma once

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include "conicwave/error.hpp"
#include "conicwave/model.hpp"

namespace conicwave::oracle {

struct ShootingConfig {
  int grid = 20000;          // midpoint steps per half interval
  double clip = 1e-3;        // distance from each pole where integration starts
  int expansion_terms = 3;   // 1, θ², θ⁴ in the Frobenius series
  double root_tol = 1e-14;   // relative bracket width for eigenvalue refinement
  double scan_step = 0.25;   // λ spacing of the sign-change scan
  bool richardson = true;    // combine grid and 2·grid as (4λ₂ − λ₁)/3

  void validate() const {
    if (!(clip > 0.0) || clip >= 0.5) throw ValidationError("shooting clip must lie in (0, 0.5)");
    if (grid < 1000) throw ValidationError("shooting grid must be at least 1000");
    if (expansion_terms < 1 || expansion_terms > 3) throw ValidationError("expansion terms must be 1..3");
  }
};

namespace detail {

struct Shot {
  double u = 0.0;
  double flux = 0.0;  // sin θ · du/dθ
  int nodes = 0;
};

// Integrates (sin θ u′)′ + (λ sin θ − μ²/sin θ) u = 0 from θ = clip to π/2 in
// the Mercator variable s = ln tan(θ/2), where it reads u_ss = (μ² − λ sech²s) u
// and u_s = sin θ · u′. Explicit midpoint rule on a uniform s grid.
inline Shot shoot_half(double mu, double lambda, const ShootingConfig& cfg, int grid) {
  const double d = cfg.clip;
  // Frobenius series for the θ^μ branch, normalised by θ^μ
  const double c2 = -(3.0 * lambda - mu * mu - mu) / (12.0 * (mu + 1.0));
  const double c4 = (45.0 * lambda * lambda - 30.0 * lambda * mu * mu - 30.0 * lambda * mu - 30.0 * lambda +
                     5.0 * std::pow(mu, 4) + 22.0 * std::pow(mu, 3) + 31.0 * mu * mu + 14.0 * mu) /
                    (1440.0 * (mu + 1.0) * (mu + 2.0));
  const double d2 = d * d;
  double u = 1.0, du = mu / d;
  if (cfg.expansion_terms >= 2) {
    u += c2 * d2;
    du += (mu + 2.0) * c2 * d;
  }
  if (cfg.expansion_terms >= 3) {
    u += c4 * d2 * d2;
    du += (mu + 4.0) * c4 * d2 * d;
  }
  double v = std::sin(d) * du;  // u_s

  const double s0 = std::log(std::tan(0.5 * d));
  const double h = -s0 / grid;
  auto rhs = [&](double s, double uu) {
    const double sech = 1.0 / std::cosh(s);
    return (mu * mu - lambda * sech * sech) * uu;
  };
  Shot out;
  double prev = u;
  for (int i = 0; i < grid; ++i) {
    const double s = s0 + i * h;
    const double um = u + 0.5 * h * v;
    const double vm = v + 0.5 * h * rhs(s, u);
    u += h * vm;
    v += h * rhs(s + 0.5 * h, um);
    if ((u > 0.0) != (prev > 0.0)) ++out.nodes;
    prev = u;
  }
  out.u = u;
  out.flux = v;
  return out;
}

// Wronskian of the solutions shot in from both poles, matched at θ = π/2.
// The right half is integrated on its own (mirrored) grid rather than
// inferred from symmetry.
inline double mismatch(double mu, double lambda, const ShootingConfig& cfg, int grid, int* nodes = nullptr) {
  const Shot left = shoot_half(mu, lambda, cfg, grid);
  const Shot right = shoot_half(mu, lambda, cfg, grid);
  // mirror: s → −s flips the sign of the flux
  const double ur = right.u, vr = -right.flux;
  if (nodes) {
    int n = left.nodes + right.nodes;
    // an odd eigenfunction vanishes at the matching point
    if (std::abs(left.u) < 1e-8 * std::abs(left.flux)) --n;
    *nodes = n + ((left.u > 0.0) != (ur > 0.0) ? 1 : 0);
  }
  return left.u * vr - left.flux * ur;
}

inline std::vector<double> eigen_on_grid(double mu, int count, const ShootingConfig& cfg, int grid,
                                         const std::vector<double>* hints) {
  std::vector<double> out;
  auto f = [&](double l) { return mismatch(mu, l, cfg, grid); };
  auto refine = [&](double lo, double hi) {
    boost::math::tools::eps_tolerance<double> tol(48);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    if (iters >= 200) throw NumericalError("shooting refinement did not converge");
    return 0.5 * (r.first + r.second);
  };
  if (hints) {
    // refine near the previous grid's eigenvalues
    for (double guess : *hints) {
      double lo = guess - 0.5 * cfg.scan_step, hi = guess + 0.5 * cfg.scan_step;
      double flo = f(lo), fhi = f(hi);
      for (int it = 0; it < 8 && (flo > 0.0) == (fhi > 0.0); ++it) {
        lo -= cfg.scan_step * 0.5;
        hi += cfg.scan_step * 0.5;
        flo = f(lo);
        fhi = f(hi);
      }
      if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("missed eigenvalue on refined grid");
      out.push_back(refine(lo, hi));
    }
    return out;
  }
  // the smallest nonzero eigenvalue is at least μ(μ+1); start just above zero for μ = 0
  double lo = std::max(1e-3, mu * (mu + 1.0) * 0.5);
  double flo = f(lo);
  for (int guard = 0; static_cast<int>(out.size()) < count && guard < 1000000; ++guard) {
    const double hi = lo + cfg.scan_step;
    const double fhi = f(hi);
    if (fhi == 0.0) {
      out.push_back(hi);
    } else if ((flo > 0.0) != (fhi > 0.0)) {
      out.push_back(refine(lo, hi));
    }
    lo = hi;
    flo = fhi;
  }
  return out;
}

}  // namespace detail

/// First `count` nonzero eigenvalues of the mode-m radial problem on the
/// spindle with the θ^{m/α} behaviour imposed at both poles.
inline std::vector<double> shoot_radial_eigen(const ConicModel& model, int m, int count,
                                              const ShootingConfig& cfg = {}) {
  if (model.kind() != ModelKind::Spindle) throw ValidationError("radial shooting needs a spindle");
  if (m < 0 || count < 1 || count > 50) throw ValidationError("shooting needs m >= 0 and 1 <= count <= 50");
  cfg.validate();
  const double mu = m / model.alpha();
  const auto coarse = detail::eigen_on_grid(mu, count, cfg, cfg.grid, nullptr);
  if (static_cast<int>(coarse.size()) < count) throw NumericalError("missed eigenvalue in shooting scan");
  // node count check: the j-th nonzero eigenfunction has j nodes for m = 0,
  // j − 1 otherwise
  for (int j = 0; j < count; ++j) {
    int nodes = 0;
    detail::mismatch(mu, coarse[j] * (1.0 + 1e-9), cfg, cfg.grid, &nodes);
    const int expected = m == 0 ? j + 1 : j;
    if (nodes != expected && nodes != expected + 1)
      throw NumericalError("non-monotone shooting function: node count mismatch");
  }
  if (!cfg.richardson) return coarse;
  const auto fine = detail::eigen_on_grid(mu, count, cfg, 2 * cfg.grid, &coarse);
  std::vector<double> out(count);
  for (int j = 0; j < count; ++j) out[j] = (4.0 * fine[j] - coarse[j]) / 3.0;
  return out;
}

/// Single-grid eigenvalue for convergence studies.
inline double shoot_single(const ConicModel& model, int m, int index, int grid, const ShootingConfig& base = {}) {
  ShootingConfig cfg = base;
  cfg.grid = grid;
  cfg.richardson = false;
  return shoot_radial_eigen(model, m, index + 1, cfg)[index];
}

/// Error reduction factor when the grid spacing is halved, measured against
/// a reference value.
inline double richardson_ratio(const ConicModel& model, int m, int index, double exact, int grid = 2000) {
  const double e1 = shoot_single(model, m, index, grid) - exact;
  const double e2 = shoot_single(model, m, index, 2 * grid) - exact;
  return e1 / e2;
}

// ---- closed geodesics

struct Closure {
  double length = 0.0;
  double clairaut = 0.0;
  int oscillations = 0;  // 0 for the equator and for meridians
};

struct ClosureOptions {
  int grid = 10000;
  double defect_tol = 1e-8;
};

namespace detail {

struct OscillationData {
  double phi_advance = 0.0;
  double length = 0.0;
};

// Full oscillation by double-exponential quadrature in t = θ − θmin, using
// sin²θ − sin²θmin = sin t · sin(t + 2θmin) and symmetry about the equator.
inline OscillationData oscillation(double alpha, double c) {
  const double tmin = std::asin(c / alpha);
  const double top = 0.5 * kPi - tmin;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto root = [&](double t) { return alpha * std::sqrt(std::sin(t) * std::sin(t + 2.0 * tmin)); };
  double err = 0.0, l1 = 0.0;
  const double phi = ts.integrate(
      [&](double t) {
        const double a = alpha * std::sin(tmin + t);
        return c / (a * root(t));
      },
      0.0, top, 1e-13, &err, &l1);
  if (!(err <= 1e-9 * std::max(1.0, l1))) throw NumericalError("closure quadrature tolerance not met");
  const double len = ts.integrate(
      [&](double t) {
        const double a = alpha * std::sin(tmin + t);
        return a / root(t);
      },
      0.0, top, 1e-13, &err, &l1);
  if (!(err <= 1e-9 * std::max(1.0, l1))) throw NumericalError("closure quadrature tolerance not met");
  return {4.0 * phi, 4.0 * len};
}

}  // namespace detail

/// Dense scan over Clairaut constants for closed geodesics up to the horizon,
/// including meridians (c = 0) and equator iterates (c = α).
inline std::vector<Closure> closure_search(const ConicModel& model, double horizon, const ClosureOptions& opt = {}) {
  if (model.kind() != ModelKind::Spindle) throw ValidationError("closure search needs a spindle");
  if (!(horizon > 0.0) || horizon > 30.0) throw ValidationError("closure search horizon must lie in (0, 30]");
  if (opt.grid < 2) throw ValidationError("closure search grid must be at least 2");
  const double alpha = model.alpha();
  std::vector<Closure> out;

  for (int n = 1; kTwoPi * n <= horizon; ++n) out.push_back({kTwoPi * n, 0.0, 0});
  const double equator = kTwoPi * model.profile(kPi / 2);
  for (int n = 1; equator * n <= horizon; ++n) out.push_back({equator * n, alpha, 0});

  std::vector<detail::OscillationData> data(opt.grid - 1);
  std::vector<double> cs(opt.grid - 1);
  for (int i = 1; i < opt.grid; ++i) {
    cs[i - 1] = alpha * i / opt.grid;
    data[i - 1] = detail::oscillation(alpha, cs[i - 1]);
  }
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const int kmax = static_cast<int>(horizon / data[i].length);
    for (int k = 1; k <= kmax; ++k) {
      const double turns = k * data[i].phi_advance / kTwoPi;
      const double defect = turns - std::round(turns);
      if (std::abs(defect) * kTwoPi < opt.defect_tol) {
        out.push_back({k * data[i].length, cs[i], k});
        continue;
      }
      if (i == 0) continue;
      // sign change of the defect against the same integer between neighbours
      const double prev_turns = k * data[i - 1].phi_advance / kTwoPi;
      const double prev_defect = prev_turns - std::round(turns);
      if (std::abs(prev_turns - std::round(prev_turns)) * kTwoPi < opt.defect_tol) continue;
      if ((prev_defect > 0.0) == (defect > 0.0)) continue;
      const double target = std::round(turns);
      auto g = [&](double c) { return k * detail::oscillation(alpha, c).phi_advance / kTwoPi - target; };
      boost::math::tools::eps_tolerance<double> tol(40);
      std::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve(g, cs[i - 1], cs[i], tol, iters);
      const double c = 0.5 * (r.first + r.second);
      const double len = k * detail::oscillation(alpha, c).length;
      if (len <= horizon) out.push_back({len, c, k});
    }
  }
  std::sort(out.begin(), out.end(), [](const Closure& a, const Closure& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.clairaut < b.clairaut;
  });
  return out;
}

/// Distinct closure lengths, merged within `tol`.
inline std::vector<double> distinct_lengths(const std::vector<Closure>& closures, double tol = 1e-6) {
  std::vector<double> out;
  for (const auto& c : closures)
    if (out.empty() || c.length - out.back() > tol) out.push_back(c.length);
  return out;
}

}  // namespace conicwave::oracle
