#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "conicwave/error.hpp"
#include "conicwave/model.hpp"
#include "conicwave/rational.hpp"

namespace conicwave::bessel {

/// J_ν(x), Y_ν(x) and their derivatives.
struct Values {
  double j = 0.0;
  double y = 0.0;
  double jp = 0.0;
  double yp = 0.0;
};

namespace detail {

// Even/odd parts of 1/Γ(1 ± μ) for |μ| ≤ 1/2, from the Taylor series of 1/Γ:
// gam1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / (2μ), gam2 = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2.
inline void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  static constexpr std::array<double, 26> c = {
      1.0,
      0.5772156649015329,
      -0.6558780715202538,
      -0.0420026350340952,
      0.1665386113822915,
      -0.0421977345555443,
      -0.0096219715278770,
      0.0072189432466630,
      -0.0011651675918591,
      -0.0002152416741149,
      0.0001280502823882,
      -0.0000201348547807,
      -0.0000012504934821,
      0.0000011330272320,
      -0.0000002056338417,
      0.0000000061160950,
      0.0000000050020075,
      -0.0000000011812746,
      0.0000000001043427,
      0.0000000000077823,
      -0.0000000000036968,
      0.0000000000005100,
      -0.0000000000000206,
      -0.0000000000000054,
      0.0000000000000014,
      0.0000000000000001};
  const double m2 = mu * mu;
  double odd = 0.0, even = 0.0, pw = 1.0;
  for (std::size_t k = 0; k + 1 < c.size(); k += 2) {
    even += c[k] * pw;
    odd += c[k + 1] * pw;
    pw *= m2;
  }
  gam1 = -odd;
  gam2 = even;
  gampl = gam2 - mu * gam1;  // 1/Γ(1+μ)
  gammi = gam2 + mu * gam1;  // 1/Γ(1−μ)
}

template <typename Real>
Values evaluate_in(Real nu, Real x) {
  using std::abs;
  const Real kPi = std::numbers::pi_v<Real>;
  const Real eps = std::numeric_limits<Real>::epsilon();
  constexpr Real fpmin = 1e-300;
  constexpr Real xmin = 2.0;
  const int maxit = 100000 + static_cast<int>(4.0 * x);

  const int nl = x < xmin ? static_cast<int>(nu + 0.5) : std::max(0, static_cast<int>(nu - x + 1.5));
  const Real mu = nu - nl;
  const Real mu2 = mu * mu;
  const Real xi = 1.0 / x;
  const Real xi2 = 2.0 * xi;
  const Real w = xi2 / kPi;

  // CF1: f = J′_ν / J_ν
  int isign = 1;
  Real h = nu * xi;
  if (h < fpmin) h = fpmin;
  Real b = xi2 * nu, d = 0.0, c = h;
  int i = 1;
  for (; i <= maxit; ++i) {
    b += xi2;
    d = b - d;
    if (abs(d) < fpmin) d = fpmin;
    c = b - 1.0 / c;
    if (abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const Real del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (abs(del - 1.0) < eps) break;
  }
  if (i > maxit) throw NumericalError("Bessel CF1 did not converge");

  // downward recurrence with rescaling; only the ratio matters
  Real rjl = isign * 1e-30;
  Real rjpl = h * rjl;
  const Real rjl1 = rjl, rjp1 = rjpl;
  Real scale_log = 0.0;
  Real fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const Real rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
    if (abs(rjl) > 1e250) {
      rjl *= 1e-250;
      rjpl *= 1e-250;
      scale_log += 250.0;
    }
  }
  if (rjl == 0.0) rjl = eps;
  const Real f = rjpl / rjl;

  Real rjmu, rymu, rymup, ry1;
  if (x < xmin) {
    const Real x2 = 0.5 * x;
    const Real pimu = kPi * mu;
    const Real fct = abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
    Real dd = -std::log(x2);
    Real e = mu * dd;
    const Real fct2 = abs(e) < eps ? 1.0 : std::sinh(e) / e;
    Real gam1, gam2, gampl, gammi;
    {
      double g1, g2, gp, gm;
      detail::temme_gammas(static_cast<double>(mu), g1, g2, gp, gm);
      gam1 = g1;
      gam2 = g2;
      gampl = gp;
      gammi = gm;
    }
    Real ff = 2.0 / kPi * fct * (gam1 * std::cosh(e) + gam2 * fct2 * dd);
    e = std::exp(e);
    Real p = e / (gampl * kPi);
    Real q = 1.0 / (e * kPi * gammi);
    const Real pimu2 = 0.5 * pimu;
    const Real fct3 = abs(pimu2) < eps ? 1.0 : std::sin(pimu2) / pimu2;
    const Real r = kPi * pimu2 * fct3 * fct3;
    Real cc = 1.0;
    dd = -x2 * x2;
    Real sum = ff + r * q;
    Real sum1 = p;
    int k = 1;
    for (; k <= maxit; ++k) {
      ff = (k * ff + p + q) / (k * k - mu2);
      cc *= dd / k;
      p /= (k - mu);
      q /= (k + mu);
      const Real del = cc * (ff + r * q);
      sum += del;
      const Real del1 = cc * p - k * del;
      sum1 += del1;
      if (abs(del) < (1.0 + abs(sum)) * eps) break;
    }
    if (k > maxit) throw NumericalError("Temme series did not converge");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = mu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    // CF2: p + iq = (J′ + iY′)/(J + iY) at order μ
    Real a = 0.25 - mu2;
    Real p = -0.5 * xi;
    Real q = 1.0;
    const Real br = 2.0 * x;
    Real bi = 2.0;
    Real fc = a * xi / (p * p + q * q);
    Real cr = br + q * fc;
    Real ci = bi + p * fc;
    Real den = br * br + bi * bi;
    Real dr = br / den;
    Real di = -bi / den;
    Real dlr = cr * dr - ci * di;
    Real dli = cr * di + ci * dr;
    Real temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    int k = 2;
    for (; k <= maxit; ++k) {
      a += 2 * (k - 1);
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (abs(dr) + abs(di) < fpmin) dr = fpmin;
      fc = a / (cr * cr + ci * ci);
      cr = br + cr * fc;
      ci = bi - ci * fc;
      if (abs(cr) + abs(ci) < fpmin) cr = fpmin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (abs(dlr - 1.0) + abs(dli) < eps) break;
    }
    if (k > maxit) throw NumericalError("Bessel CF2 did not converge");
    const Real gam = (p - f) / q;
    rjmu = std::sqrt(w / ((p - f) * gam + q));
    rjmu = std::copysign(rjmu, rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = mu * xi * rymu - rymup;
  }

  Values out;
  // undo the recurrence rescaling: J_ν = rjl1 · (J_μ / rjl) · 10^{-scale}
  const Real factor = (rjmu / rjl) * std::pow(Real(10), -scale_log);
  out.j = static_cast<double>(rjl1 * factor);
  out.jp = static_cast<double>(rjp1 * factor);
  for (int l = 1; l <= nl; ++l) {
    const Real rytemp = (mu + l) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  out.y = static_cast<double>(rymu);
  out.yp = static_cast<double>(nu * xi * rymu - ry1);
  return out;
}


}  // namespace detail

/// Bessel functions of real order ν ≥ 0 at x > 0.
///
/// Steed's method: the continued fraction CF1 gives J′/J at order ν, downward
/// recurrence carries it to |μ| ≤ 1/2, and the pair is normalised through the
/// Wronskian using Temme's series (x < 2) or the complex continued fraction
/// CF2 (x ≥ 2).
/// Internally carried in extended precision: near a zero the phase error of
/// CF2 grows with x and would otherwise reach 1e-12 by x ≈ 300.
inline Values evaluate(double nu, double x) {
  if (!(x > 0.0) || !(nu >= 0.0)) throw ValidationError("Bessel evaluation needs x > 0, nu >= 0");
  return detail::evaluate_in<long double>(nu, x);
}

/// Which family of zeros: of J_ν (Dirichlet) or of J′_ν (Neumann).
enum class ZeroKind { Function, Derivative };

inline double j(double nu, double x) { return evaluate(nu, x).j; }
inline double jp(double nu, double x) { return evaluate(nu, x).jp; }

namespace detail {

// k-th zero of Ai (or of Ai′), negative; tabulated for the first few and
// asymptotic beyond.
inline double airy_zero(int k, ZeroKind kind) {
  static constexpr std::array<double, 3> ai = {-2.338107410459767, -4.087949444130971, -5.520559828095551};
  static constexpr std::array<double, 3> aip = {-1.018792971647471, -3.248197582179837, -4.820099211178736};
  if (k <= 3) return kind == ZeroKind::Function ? ai[k - 1] : aip[k - 1];
  if (kind == ZeroKind::Function) {
    const double t = 3.0 * kPi / 8.0 * (4.0 * k - 1.0);
    const double t2 = 1.0 / (t * t);
    return -std::pow(t, 2.0 / 3.0) * (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * 77125.0 / 82944.0)));
  }
  const double t = 3.0 * kPi / 8.0 * (4.0 * k - 3.0);
  const double t2 = 1.0 / (t * t);
  return -std::pow(t, 2.0 / 3.0) * (1.0 + t2 * (-7.0 / 48.0 + t2 * (35.0 / 288.0 - t2 * 181223.0 / 207360.0)));
}

// Solves (2/3)ζ^{3/2} = √(z² − 1) − arcsec z for z > 1 (Olver's uniform variable).
inline double olver_z(double zeta) {
  const double target = 2.0 / 3.0 * std::pow(zeta, 1.5);
  double lo = 1.0, hi = 2.0;
  auto g = [](double z) { return std::sqrt(z * z - 1.0) - std::acos(1.0 / z); };
  while (g(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// McMahon's expansion for large k.
inline double mcmahon(double nu, int k, ZeroKind kind) {
  const double mu = 4.0 * nu * nu;
  const double beta = (k + 0.5 * nu - (kind == ZeroKind::Function ? 0.25 : 0.75)) * kPi;
  const double e = 1.0 / (8.0 * beta);
  if (kind == ZeroKind::Function) {
    return beta - (mu - 1.0) * e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) * e * e * e / 3.0 -
           32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) * std::pow(e, 5) / 15.0;
  }
  return beta - (mu + 3.0) * e - 4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) * e * e * e / 3.0;
}

inline double initial_guess(double nu, int k, ZeroKind kind) {
  if (nu < 2.0 || k > 4.0 * nu) return mcmahon(nu, k, kind);
  // Olver: j_{ν,k} ≈ ν z(ζ), ζ = ν^{-2/3} |a_k|
  const double zeta = std::pow(nu, -2.0 / 3.0) * -airy_zero(k, kind);
  return nu * olver_z(zeta);
}

inline double target(double nu, double x, ZeroKind kind, double* slope) {
  const Values v = evaluate(nu, x);
  if (kind == ZeroKind::Function) {
    if (slope) *slope = v.jp;
    return v.j;
  }
  // J″ from Bessel's equation
  if (slope) *slope = -v.jp / x - (1.0 - nu * nu / (x * x)) * v.j;
  return v.jp;
}

}  // namespace detail

/// Safeguarded Newton inside a sign-changing bracket [lo, hi].
inline double refine_zero(double nu, double lo, double hi, ZeroKind kind) {
  double flo = detail::target(nu, lo, kind, nullptr);
  double fhi = detail::target(nu, hi, kind, nullptr);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("Bessel zero bracket has no sign change");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double fx = detail::target(nu, x, kind, &slope);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    double next = x - fx / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4e-16 * x) return next;
    x = next;
    if (hi - lo <= 4e-16 * x) return x;
  }
  throw NumericalError("Bessel zero refinement did not converge");
}

/// All zeros of J_ν (or J′_ν) in (0, x_max], ascending; found by scanning for
/// sign changes with a step below the minimal zero spacing and refining each.
inline std::vector<double> zeros_below(double nu, double x_max, ZeroKind kind) {
  std::vector<double> out;
  // no zeros of J_ν below ν, nor of J′_ν below ν (ν > 0)
  double x = std::max(nu, 1e-6);
  if (x >= x_max) return out;
  constexpr double step = 0.5;
  double fx = detail::target(nu, x, kind, nullptr);
  while (x < x_max) {
    const double xn = std::min(x + step, x_max);
    const double fn = detail::target(nu, xn, kind, nullptr);
    if (fn == 0.0) {
      out.push_back(xn);
    } else if (fx != 0.0 && (fx > 0.0) != (fn > 0.0)) {
      out.push_back(refine_zero(nu, x, xn, kind));
    }
    x = xn;
    fx = fn;
  }
  return out;
}

/// k-th positive zero of J_ν (or J′_ν), k ≥ 1.
///
/// Asymptotic guess (McMahon for large k, Olver's uniform expansion for large
/// order), bracketed by expanding half-spacing steps and refined by
/// safeguarded Newton.
inline double zero(double nu, int k, ZeroKind kind = ZeroKind::Function) {
  if (!(nu >= 0.0) || k < 1) throw ValidationError("bessel zero needs nu >= 0 and k >= 1");
  if (kind == ZeroKind::Derivative && nu == 0.0) {
    // J′₀ = −J₁; x = 0 is not counted
    return zero(1.0, k, ZeroKind::Function);
  }
  if (k <= 3 && nu < 2.0) {
    // small zeros: the scan is exact in its indexing and cheap here
    const auto zs = zeros_below(nu, 3.5 * k + nu + 4.0, kind);
    if (static_cast<int>(zs.size()) >= k) return zs[k - 1];
  }
  const double guess = std::max(detail::initial_guess(nu, k, kind), nu + 1e-3);
  // walk outward from the guess; the nearest sign change is the k-th zero
  constexpr double step = 0.2;
  const double floor_x = nu > 0.0 ? nu : 1e-6;
  const double f0 = detail::target(nu, guess, kind, nullptr);
  double up = guess, fup = f0, down = guess, fdown = f0;
  for (int i = 0; i < 400; ++i) {
    const double u = up + step;
    const double fu = detail::target(nu, u, kind, nullptr);
    if ((fu > 0.0) != (fup > 0.0)) return refine_zero(nu, up, u, kind);
    up = u;
    fup = fu;
    if (down > floor_x) {
      const double d = std::max(down - step, floor_x);
      const double fd = detail::target(nu, d, kind, nullptr);
      if ((fd > 0.0) != (fdown > 0.0)) return refine_zero(nu, d, down, kind);
      down = d;
      fdown = fd;
    }
  }
  throw NumericalError("could not bracket Bessel zero nu=" + format_double(nu) + " k=" + std::to_string(k));
}

}  // namespace conicwave::bessel
