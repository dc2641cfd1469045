#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conicwave/error.hpp"
#include "conicwave/model.hpp"
#include "conicwave/ode.hpp"

namespace conicwave {

enum class SegmentKind { Interior, BoundaryTransit };
enum class JumpKind { Diffractive, Geometric };

inline std::string_view to_string(SegmentKind k) {
  return k == SegmentKind::Interior ? "interior" : "boundary_transit";
}

struct Segment {
  BCospherePoint start;
  BCospherePoint end;
  double length = 0.0;
  SegmentKind kind = SegmentKind::Interior;
};

/// Concatenation of flow segments joined at cone points.
struct GeodesicPath {
  std::vector<Segment> segments;
  std::vector<JumpKind> jumps;

  /// Boundary transits carry no length: the length form vanishes over x = 0.
  double total_length() const {
    double s = 0.0;
    for (const auto& seg : segments)
      if (seg.kind == SegmentKind::Interior) s += seg.length;
    return s;
  }
};

/// Per-unit-length velocity of the rescaled geodesic field.
struct Tangent {
  double dx = 0.0;
  double dy = 0.0;
  double dxi = 0.0;
  double deta = 0.0;
};

namespace detail {

using FlowState = ode::State<4>;  // x, unwrapped y, ξ̄, η̄

inline FlowState field(const ConicModel& model, const FlowState& s) {
  const double x = s[0], xi = s[2], eta = s[3];
  const double a = model.chart_profile(x);
  const double ap = model.chart_profile_derivative(x);
  const double a2 = a * a;
  return {xi, eta * x / a2, eta * eta * x * x * ap / (a2 * a), -eta * xi / x};
}

inline void project(const ConicModel& model, FlowState& s, double* defect = nullptr) {
  const double r = model.chart_ratio(s[0]) * s[3];
  const double c = s[2] * s[2] + r * r;
  if (defect) *defect = std::abs(c - 1.0);
  const double k = 1.0 / std::sqrt(c);
  s[2] *= k;
  s[3] *= k;
}

}  // namespace detail

/// Rescaled field in unit-speed time: dx = ξ̄, dφ = η̄x/a², dξ̄ = η̄²x²a′/a³, dη̄ = −η̄ξ̄/x.
inline Tangent rescaled_field(const ConicModel& model, const BCospherePoint& p, double tol = 1e-8) {
  if (!(p.x > 0.0)) throw ValidationError("rescaled_field requires an interior point (x > 0)");
  if (std::abs(constraint(model, p) - 1.0) > tol)
    throw ValidationError("point is off the constraint set c = 1");
  const auto f = detail::field(model, {p.x, p.y, p.xi_bar, p.eta_bar});
  return {f[0], f[1], f[2], f[3]};
}

enum class FlowEvent { None, ConeArrival, Rim };

struct FlowOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double x_event = 1e-8;
  double eta_event = 1e-6;
  std::size_t max_steps = 20'000'000;
  /// Radii whose crossings are located and reported (they do not stop the flow).
  std::vector<double> crossing_radii;
  /// Lengths at which the state is sampled, ascending.
  std::vector<double> sample_lengths;
};

struct Crossing {
  double length = 0.0;
  double radius = 0.0;
  BCospherePoint state;
  double unwrapped_y = 0.0;
};

struct FlowResult {
  GeodesicPath path;  // one interior segment
  FlowEvent event = FlowEvent::None;
  double length = 0.0;     // interior length actually travelled
  double remaining = 0.0;  // target − length
  BCospherePoint end;
  double unwrapped_y_change = 0.0;
  double max_constraint_defect = 0.0;  // largest |c − 1| seen before projection
  std::size_t steps = 0;
  std::vector<Crossing> crossings;
  std::vector<std::pair<double, BCospherePoint>> samples;
};

using FlowObserver = std::function<void(double, const BCospherePoint&)>;

namespace detail {

inline BCospherePoint to_point(int component, const FlowState& s) {
  return {component, s[0], wrap_angle(s[1]), s[2], s[3]};
}

// Radial segments (η̄ = 0) are straight in x and are integrated in closed form.
inline FlowResult flow_radial(const ConicModel& model, const BCospherePoint& p, double target,
                              const FlowOptions& opts, const FlowObserver& observer) {
  FlowResult r;
  int comp = p.component;
  double x = p.x;
  const double dir = p.xi_bar >= 0.0 ? 1.0 : -1.0;
  double s = 0.0;
  auto state_at = [&](double len) {
    // position after travelling len from (comp, x) in direction dir
    BCospherePoint q{comp, x + dir * len, p.y, dir, 0.0};
    if (model.kind() == ModelKind::Spindle && q.x > kPi / 2) q = switch_chart(model, q);
    return q;
  };
  double limit;  // distance to the next cone point or rim
  FlowEvent ev;
  if (dir < 0.0) {
    limit = x;
    ev = FlowEvent::ConeArrival;
  } else if (model.kind() == ModelKind::Spindle) {
    limit = kPi - x;
    ev = FlowEvent::ConeArrival;
  } else {
    limit = model.rim_radius() - x;
    ev = FlowEvent::Rim;
  }
  const double travelled = std::min(limit, target);
  for (double sl : opts.sample_lengths)
    if (sl <= travelled) r.samples.emplace_back(sl, state_at(sl));
  for (double rad : opts.crossing_radii) {
    // radial paths cross each radius at most once per chart
    for (int c = 0; c < model.cone_point_count(); ++c) {
      double len = -1.0;
      if (c == comp) len = dir > 0 ? rad - x : x - rad;
      else if (model.kind() == ModelKind::Spindle && dir > 0) len = (kPi - x) - rad;
      if (len >= 0.0 && len <= travelled) {
        BCospherePoint q = state_at(len);
        r.crossings.push_back({len, rad, q, p.y});
      }
    }
  }
  std::sort(r.crossings.begin(), r.crossings.end(),
            [](const Crossing& a, const Crossing& b) { return a.length < b.length; });
  if (observer) observer(0.0, p);
  BCospherePoint end;
  if (target < limit) {
    end = state_at(target);
    r.event = FlowEvent::None;
  } else {
    r.event = ev;
    if (ev == FlowEvent::ConeArrival) {
      const int arrival_comp = (dir < 0.0) ? comp : 1 - comp;
      end = {arrival_comp, 0.0, p.y, -1.0, 0.0};
    } else {
      end = {comp, model.rim_radius(), p.y, 1.0, 0.0};
    }
  }
  s = travelled;
  if (observer) observer(s, end);
  r.length = s;
  r.remaining = target - s;
  r.end = end;
  r.path.segments.push_back({p, end, s, SegmentKind::Interior});
  return r;
}

}  // namespace detail

/// Integrates the rescaled field from an interior point for at most
/// `target_length`, stopping early at a cone-point arrival or at the flat
/// cone's rim.
///
/// Dormand–Prince 5(4) in unit-speed time; (ξ̄, η̄) is projected back onto
/// c = 1 after every accepted step. Spindle states switch chart when they
/// cross the equator so that x always measures distance to the nearer cone
/// point. An arrival is declared once x < x_event with |η̄| < η_event; the
/// remaining distance is then completed along the radial form x = x₀ − s.
inline FlowResult flow_interior(const ConicModel& model, const BCospherePoint& p, double target_length,
                                const FlowOptions& opts = {}, const FlowObserver& observer = {}) {
  model.check_component(p.component);
  if (!(target_length > 0.0)) throw ValidationError("flow target length must be positive");
  if (std::abs(constraint(model, p) - 1.0) > 1e-8)
    throw ValidationError("flow start point is off the constraint set");
  if (p.eta_bar == 0.0) return detail::flow_radial(model, p, target_length, opts, observer);
  if (!(p.x > 0.0)) throw ValidationError("non-radial flow must start at an interior point");

  using detail::FlowState;
  const auto f = [&model](const FlowState& s) { return detail::field(model, s); };

  FlowResult r;
  int comp = p.component;
  FlowState y{p.x, p.y, p.xi_bar, p.eta_bar};
  const double y_origin = p.y;
  double s = 0.0;
  double h = std::min(opts.initial_step, target_length);
  std::size_t next_sample = 0;
  const bool flat = model.kind() == ModelKind::FlatCone;
  if (observer) observer(0.0, p);

  // Re-integrates from y0 with a single step of length hh; used for sampling and event location.
  auto single = [&](const FlowState& y0, double hh) {
    if (hh == 0.0) return y0;
    auto st = ode::dopri_step<4>(f, y0, f(y0), hh, opts.rtol, opts.atol);
    detail::project(model, st.y);
    return st.y;
  };
  // Bisection for the length inside [0, hh] where g changes sign.
  auto locate = [&](const FlowState& y0, double hh, auto&& g) {
    double lo = 0.0, hi = hh;
    const double g0 = g(y0);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, s); ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((g(single(y0, mid)) > 0.0) == (g0 > 0.0)) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  while (true) {
    const double remaining = target_length - s;
    if (remaining <= 0.0) {
      r.event = FlowEvent::None;
      break;
    }
    if (r.steps >= opts.max_steps) throw NumericalError("flow exceeded its step budget");
    h = std::min(h, remaining);

    // nearly radial inbound motion: land just inside the event radius
    const bool radial_inbound = y[2] < 0.0 && std::abs(y[3]) < opts.eta_event;
    if (radial_inbound && y[0] + y[2] * h <= opts.x_event)
      h = std::min(h, (y[0] - 0.5 * opts.x_event) / (-y[2]));

    const FlowState f0 = f(y);
    auto step = ode::dopri_step<4>(f, y, f0, h, opts.rtol, opts.atol);
    if (step.error > 1.0 || !(step.y[0] > 0.0) || !std::isfinite(step.y[3])) {
      h = (step.error > 1.0 && std::isfinite(step.error)) ? ode::next_step(h, step.error) : 0.25 * h;
      if (h < opts.min_step)
        throw NumericalError("step-size underflow at length " + format_double(s) + ", x = " +
                             format_double(y[0]));
      continue;
    }
    double defect = 0.0;
    detail::project(model, step.y, &defect);
    r.max_constraint_defect = std::max(r.max_constraint_defect, defect);
    ++r.steps;

    // rim of the flat cone: stop at the crossing
    if (flat && step.y[0] >= model.rim_radius()) {
      const double R = model.rim_radius();
      const double hh = locate(y, h, [R](const FlowState& st) { return st[0] - R; });
      y = single(y, hh);
      y[0] = R;
      s += hh;
      r.event = FlowEvent::Rim;
      break;
    }

    for (double rad : opts.crossing_radii) {
      if ((y[0] - rad) * (step.y[0] - rad) < 0.0) {
        const double hh = locate(y, h, [rad](const FlowState& st) { return st[0] - rad; });
        const FlowState yc = single(y, hh);
        r.crossings.push_back({s + hh, rad, detail::to_point(comp, yc), yc[1] - y_origin});
      }
    }
    while (next_sample < opts.sample_lengths.size() && opts.sample_lengths[next_sample] <= s + h) {
      const double sl = opts.sample_lengths[next_sample++];
      if (sl < s) continue;
      r.samples.emplace_back(sl, detail::to_point(comp, single(y, sl - s)));
    }

    y = step.y;
    s += h;
    h = ode::next_step(h, step.error);

    if (model.kind() == ModelKind::Spindle && y[0] > kPi / 2) {
      const auto q = switch_chart(model, detail::to_point(comp, y));
      comp = q.component;
      y = {q.x, y[1], q.xi_bar, q.eta_bar};
    }
    if (observer) observer(s, detail::to_point(comp, y));

    if (y[0] < opts.x_event && std::abs(y[3]) < opts.eta_event && y[2] < 0.0) {
      // radial completion x = x₀ − s
      const double rest = std::min(y[0], target_length - s);
      s += rest;
      if (rest < y[0]) {
        y[0] -= rest;
        r.event = FlowEvent::None;
      } else {
        y = {0.0, y[1], -1.0, 0.0};
        r.event = FlowEvent::ConeArrival;
      }
      break;
    }
  }

  r.end = detail::to_point(comp, y);
  r.unwrapped_y_change = y[1] - y_origin;
  r.length = s;
  r.remaining = target_length - s;
  r.path.segments.push_back({p, r.end, s, SegmentKind::Interior});
  if (observer) observer(s, r.end);
  return r;
}

namespace detail {

struct Vec3 {
  double x, y, z;
};
inline Vec3 operator*(double k, Vec3 v) { return {k * v.x, k * v.y, k * v.z}; }
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Spindle in (θ, ψ = αφ) is locally the round sphere; geodesics are great circles.
inline BCospherePoint spindle_exact(const ConicModel& model, const BCospherePoint& p, double L) {
  const double alpha = model.alpha();
  const GlobalState g = to_global(model, p);
  const double psi0 = alpha * g.phi;
  auto point = [](double th, double ps) {
    return Vec3{std::sin(th) * std::cos(ps), std::sin(th) * std::sin(ps), std::cos(th)};
  };
  auto e_theta = [](double th, double ps) {
    return Vec3{std::cos(th) * std::cos(ps), std::cos(th) * std::sin(ps), -std::sin(th)};
  };
  auto e_psi = [](double ps) { return Vec3{-std::sin(ps), std::cos(ps), 0.0}; };
  const Vec3 P0 = point(g.theta, psi0);
  const Vec3 T0 = g.v_theta * e_theta(g.theta, psi0) + g.v_perp * e_psi(psi0);

  // accumulate ψ over arcs shorter than π/2 so each increment is unambiguous
  const int pieces = std::max(1, static_cast<int>(std::ceil(L / (kPi / 4))));
  double psi = psi0;
  Vec3 prev = P0;
  for (int i = 1; i <= pieces; ++i) {
    const double si = L * i / pieces;
    const Vec3 cur = std::cos(si) * P0 + std::sin(si) * T0;
    psi += angle_diff(std::atan2(prev.y, prev.x), std::atan2(cur.y, cur.x));
    prev = cur;
  }
  const Vec3 V = (-std::sin(L)) * P0 + std::cos(L) * T0;
  const double theta = std::acos(std::clamp(prev.z, -1.0, 1.0));
  GlobalState out;
  out.theta = theta;
  out.phi = psi / alpha;
  out.v_theta = dot(V, e_theta(theta, psi));
  out.v_perp = dot(V, e_psi(psi));
  return from_global(model, out);
}

// Flat cone: unfold to a planar sector of angle 2πα, where geodesics are straight.
inline BCospherePoint flat_exact(const ConicModel& model, const BCospherePoint& p, double L) {
  const double alpha = model.alpha();
  const double beta0 = alpha * p.y;
  const double vr = p.xi_bar;
  const double vt = model.chart_ratio(p.x) * p.eta_bar;
  const double cx = std::cos(beta0), sx = std::sin(beta0);
  const double px = p.x * cx, py = p.x * sx;
  const double dx = vr * cx - vt * sx, dy = vr * sx + vt * cx;
  const double qx = px + L * dx, qy = py + L * dy;
  const double r = std::hypot(qx, qy);
  if (r > model.rim_radius() * (1.0 + 1e-14))
    throw ValidationError("exact flow leaves the flat cone through its rim");
  // a segment avoiding the tip sweeps less than π
  const double dbeta = angle_diff(beta0, std::atan2(qy, qx));
  const double beta = beta0 + dbeta;
  BCospherePoint q;
  q.component = 0;
  q.x = r;
  q.y = wrap_angle(beta / alpha);
  q.xi_bar = (dx * qx + dy * qy) / r;
  const double vt_end = (-dx * qy + dy * qx) / r;
  q.eta_bar = vt_end / model.chart_ratio(r);
  return q;
}

}  // namespace detail

/// Closed-form endpoint of the interior geodesic flow (great circles on the
/// spindle's sphere cover, straight lines in the unfolded flat cone).
inline BCospherePoint flow_exact(const ConicModel& model, const BCospherePoint& p, double target_length) {
  if (target_length < 0.0) throw ValidationError("flow target length must be non-negative");
  if (!(p.x > 0.0)) throw ValidationError("exact flow requires an interior start point");
  if (clairaut_constant(p) == 0.0) {
    // meridian: reaches a cone point unless the length runs out first
    const double to_cone = p.xi_bar < 0.0 ? p.x
                           : model.kind() == ModelKind::Spindle ? kPi - p.x
                                                                : std::numeric_limits<double>::infinity();
    if (target_length >= to_cone)
      throw ConePointError("trajectory hits a cone point (Clairaut constant 0)");
    if (model.kind() == ModelKind::FlatCone && p.xi_bar > 0.0 && p.x + target_length > model.rim_radius())
      throw ValidationError("exact flow leaves the flat cone through its rim");
    BCospherePoint q = p;
    q.x = p.x + p.xi_bar * target_length;
    if (model.kind() == ModelKind::Spindle && q.x > kPi / 2) q = switch_chart(model, q);
    return q;
  }
  return model.kind() == ModelKind::Spindle ? detail::spindle_exact(model, p, target_length)
                                            : detail::flat_exact(model, p, target_length);
}

enum class RadialSign { Inward, Outward };

/// Radial state over a cone point: every geodesic leaving a cone point is a meridian.
inline BCospherePoint diffractive_outgoing(const ConicModel& model, int component, double y_out,
                                           RadialSign sign = RadialSign::Outward) {
  model.check_component(component);
  return {component, 0.0, wrap_angle(y_out), sign == RadialSign::Outward ? 1.0 : -1.0, 0.0};
}

/// φ-advance accumulated while a spindle geodesic with Clairaut constant `b`
/// stays inside the polar cap x < cap. The launch is from the equator toward
/// cone point 0.
inline double polar_passage_advance(const ConicModel& model, double b, double cap = kPi / 4,
                                    FlowOptions opts = {}) {
  if (model.kind() != ModelKind::Spindle) throw ValidationError("polar passage requires a spindle");
  if (!(b > 0.0 && b < model.alpha())) throw ValidationError("impact parameter must lie in (0, alpha)");
  const double x0 = kPi / 2;
  BCospherePoint p{0, x0, 0.0, -std::sqrt(1.0 - (b / model.alpha()) * (b / model.alpha())), b / x0};
  opts.crossing_radii = {cap};
  const auto r = flow_interior(model, p, kPi, opts);
  if (r.crossings.size() < 2) throw NumericalError("polar cap was not traversed");
  return r.crossings[1].unwrapped_y - r.crossings[0].unwrapped_y;
}

}  // namespace conicwave
