#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "conicwave/error.hpp"
#include "conicwave/model.hpp"

namespace conicwave {

/// φ-advance and arc length of one full radial oscillation of a non-meridian geodesic.
struct OscillationIntegrals {
  double phi_advance = 0.0;
  double length = 0.0;
};

namespace detail {

// sin(u)/u with the removable singularity filled in.
inline double sinc(double u) { return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

// Gauss–Kronrod on [lo, hi] with a relative tolerance check.
template <class F>
double integrate_checked(F&& f, double lo, double hi, const char* what) {
  if (!(hi > lo)) return 0.0;
  double error = 0.0, l1 = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-14, &error, &l1);
  if (!(error <= 1e-11 * std::max(1.0, l1)) || !std::isfinite(v))
    throw NumericalError(std::string("quadrature did not converge for ") + what);
  return v;
}

// For the turning-point substitution θ = θmin + w², returns
// (a² − c²) / (α² w²) and a, both smooth in w.
inline void turning_factors(const ConicModel& model, double theta_min, double w, double& reduced,
                            double& a) {
  const double theta = theta_min + w * w;
  if (model.kind() == ModelKind::Spindle) {
    reduced = sinc(w * w) * std::sin(theta + theta_min);
    a = model.alpha() * std::sin(theta);
  } else {
    reduced = theta + theta_min;
    a = model.alpha() * theta;
  }
}

}  // namespace detail

/// Turning coordinate θmin where a(θmin) = c.
inline double turning_coordinate(const ConicModel& model, double c) {
  if (model.kind() == ModelKind::Spindle) return std::asin(c / model.alpha());
  return c / model.alpha();
}

/// Clairaut quadrature of ∫ c dθ / (a √(a² − c²)) and ∫ a dθ / √(a² − c²) from the
/// turning point θmin up to θ_hi, using θ = θmin + w² to remove the inverse
/// square-root endpoint singularity.
inline OscillationIntegrals clairaut_from_turning_point(const ConicModel& model, double c,
                                                        double theta_hi) {
  const double alpha = model.alpha();
  const double theta_min = turning_coordinate(model, c);
  if (!(theta_hi > theta_min)) return {};
  const double w_max = std::sqrt(theta_hi - theta_min);
  // the integrand varies on the scale √θmin for near-meridian geodesics
  const double w_split = std::min(w_max, 3.0 * std::sqrt(theta_min));
  auto phi_integrand = [&](double w) {
    double reduced, a;
    detail::turning_factors(model, theta_min, w, reduced, a);
    return 2.0 * c / (a * alpha * std::sqrt(reduced));
  };
  auto len_integrand = [&](double w) {
    double reduced, a;
    detail::turning_factors(model, theta_min, w, reduced, a);
    return 2.0 * a / (alpha * std::sqrt(reduced));
  };
  OscillationIntegrals out;
  out.phi_advance = detail::integrate_checked(phi_integrand, 0.0, w_split, "phi advance") +
                    detail::integrate_checked(phi_integrand, w_split, w_max, "phi advance");
  out.length = detail::integrate_checked(len_integrand, 0.0, w_split, "arc length") +
               detail::integrate_checked(len_integrand, w_split, w_max, "arc length");
  return out;
}

/// One full oscillation θmin → π − θmin → θmin on the spindle, 0 < c < α.
inline OscillationIntegrals radial_oscillation(const ConicModel& model, double c) {
  if (model.kind() != ModelKind::Spindle) throw ValidationError("radial oscillation requires a spindle");
  if (!(c > 0.0 && c < model.alpha()))
    throw ValidationError("Clairaut constant must lie in (0, alpha)");
  const OscillationIntegrals quarter = clairaut_from_turning_point(model, c, kPi / 2);
  return {4.0 * quarter.phi_advance, 4.0 * quarter.length};
}

}  // namespace conicwave
