#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

#include "conicwave/flow.hpp"
#include "conicwave/model.hpp"
#include "conicwave/rational.hpp"

namespace conicwave {

/// True when y_in and y_out are joined by a cross-section geodesic of length π.
inline bool is_geometric_pair(const ConicModel& model, double y_in, double y_out, double tol = 1e-9) {
  return std::abs(model.cross_section().distance(y_in, y_out) - kPi) <= tol;
}

/// Exact variant for Δφ = (dphi_over_pi)·π with rational α; falls back to the
/// tolerance test when α was given as a decimal.
inline bool is_geometric_pair(const ConicModel& model, Rational dphi_over_pi, double tol = 1e-9) {
  const auto& exact = model.alpha_param().rational();
  if (!exact) return is_geometric_pair(model, 0.0, dphi_over_pi.value() * kPi, tol);
  // reduce Δφ/π into [0, 2) and take the shorter arc
  const std::int64_t m = dphi_over_pi.den;
  std::int64_t n = dphi_over_pi.num % (2 * m);
  if (n < 0) n += 2 * m;
  const std::int64_t shorter = std::min(n, 2 * m - n);
  // α · shorter/m == 1
  return shorter * exact->num == m * exact->den;
}

enum class RelationMode { Diffractive, Geometric };
enum class Verdict { False, True, Indeterminate };

struct RelatesOptions {
  double tol = 1e-6;
  int max_jumps = 6;
};

struct RelatesResult {
  Verdict verdict = Verdict::False;
  std::optional<GeodesicPath> witness;
};

namespace detail {

// Minimum of the endpoint mismatch over lengths in [t − tol, t + tol] (golden section).
inline double interior_mismatch(const ConicModel& model, const BCospherePoint& p, const BCospherePoint& q,
                                double t, double tol, double& best_len) {
  auto dist = [&](double len) {
    try {
      return state_distance(model, flow_exact(model, p, len), q);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = std::max(0.0, t - tol), hi = t + tol;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = dist(a), fb = dist(b);
  for (int i = 0; i < 60; ++i) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = dist(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = dist(b);
    }
  }
  const double ft = dist(t);
  if (ft <= std::min(fa, fb)) {
    best_len = t;
    return ft;
  }
  best_len = fa < fb ? a : b;
  return std::min(fa, fb);
}

// Cone point a meridian state is heading to, and the distance to it.
inline std::pair<int, double> radial_target(const ConicModel& model, const BCospherePoint& p) {
  if (p.xi_bar < 0.0) return {p.component, p.x};
  if (model.kind() == ModelKind::Spindle) return {1 - p.component, kPi - p.x};
  return {-1, model.rim_radius() - p.x};  // rim; not a cone point
}

// Cone point a meridian state emanated from, and the distance travelled since.
inline std::pair<int, double> radial_source(const ConicModel& model, const BCospherePoint& q) {
  if (q.xi_bar > 0.0) return {q.component, q.x};
  if (model.kind() == ModelKind::Spindle) return {1 - q.component, kPi - q.x};
  return {-1, model.rim_radius() - q.x};
}

// Exit angle reached after j geometric jumps from y_in, closest to y_target.
inline std::optional<std::vector<double>> geometric_chain(const ConicModel& model, double y_in,
                                                          double y_target, int jumps, double tol) {
  const double step = kPi / model.alpha();
  if (model.alpha() < 1.0 - 1e-12) return std::nullopt;  // no π-pairs: h₀-diameter is πα
  for (int plus = 0; plus <= jumps; ++plus) {
    const int net = 2 * plus - jumps;
    const double y_end = y_in + net * step;
    if (model.alpha() * std::abs(angle_diff(y_end, y_target)) <= tol) {
      std::vector<double> ys;
      double y = y_in;
      for (int i = 0; i < jumps; ++i) {
        y += (i < plus ? step : -step);
        ys.push_back(wrap_angle(y));
      }
      return ys;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Decides p ∼ q at length t in the diffractive (D) or geometric (G) sense.
///
/// Rotational symmetry reduces the search: only meridians reach a cone point,
/// so a path with jumps consists of an inbound meridian from p, whole
/// pole-to-pole meridians, and an outbound meridian ending at q; each jump
/// contributes only its exit angle. Diffractive jumps may exit anywhere on the
/// same component; geometric jumps must exit at h₀-distance π. Jump counts
/// beyond `max_jumps` that would satisfy the length budget make the answer
/// indeterminate rather than false.
inline RelatesResult relates(const ConicModel& model, const BCospherePoint& p, const BCospherePoint& q,
                             double t, RelationMode mode, const RelatesOptions& opts = {}) {
  if (!(t > 0.0)) throw ValidationError("relation length must be positive");
  const double tol = opts.tol;
  RelatesResult out;

  // purely interior path
  if (clairaut_constant(p) != 0.0) {
    double len = t;
    if (detail::interior_mismatch(model, p, q, t, tol, len) <= tol) {
      GeodesicPath path;
      path.segments.push_back({p, flow_exact(model, p, len), len, SegmentKind::Interior});
      out.verdict = Verdict::True;
      out.witness = std::move(path);
      return out;
    }
  } else {
    const auto [cone, d] = detail::radial_target(model, p);
    if (t < d) {
      const auto end = flow_exact(model, p, t);
      if (state_distance(model, end, q) <= tol) {
        GeodesicPath path;
        path.segments.push_back({p, end, t, SegmentKind::Interior});
        out.verdict = Verdict::True;
        out.witness = std::move(path);
        return out;
      }
    }
  }

  // paths through cone points need meridian endpoints
  const double lp = std::abs(clairaut_constant(p)), lq = std::abs(clairaut_constant(q));
  if (lp > tol || lq > tol) return out;
  const auto [first_cone, d_first] = detail::radial_target(model, p);
  const auto [last_cone, d_last] = detail::radial_source(model, q);
  if (first_cone < 0 || last_cone < 0) return out;
  const bool spindle = model.kind() == ModelKind::Spindle;
  const double transit = spindle ? kPi : 0.0;
  const int jump_cap = spindle ? opts.max_jumps : 1;  // flat-cone rim reflections are not searched

  auto cone_of_jump = [&](int j) { return (j % 2 == 1) ? first_cone : 1 - first_cone; };
  for (int jumps = 1; jumps <= jump_cap; ++jumps) {
    const double len = d_first + (jumps - 1) * transit + d_last;
    if (std::abs(len - t) > tol) continue;
    if (spindle && cone_of_jump(jumps) != last_cone) continue;
    if (!spindle && first_cone != last_cone) continue;
    std::vector<double> exits;
    if (mode == RelationMode::Geometric) {
      auto chain = detail::geometric_chain(model, p.y, q.y, jumps, tol);
      if (!chain) continue;
      exits = *chain;
    } else {
      exits.assign(jumps, q.y);
    }
    GeodesicPath path;
    BCospherePoint cur = p;
    int cone = first_cone;
    double seg_len = d_first;
    double y_in = p.y;
    for (int j = 0; j < jumps; ++j) {
      const BCospherePoint arrive = diffractive_outgoing(model, cone, y_in, RadialSign::Inward);
      path.segments.push_back({cur, arrive, seg_len, SegmentKind::Interior});
      const BCospherePoint leave = diffractive_outgoing(model, cone, exits[j]);
      path.segments.push_back({arrive, leave, 0.0, SegmentKind::BoundaryTransit});
      path.jumps.push_back(mode == RelationMode::Geometric ? JumpKind::Geometric : JumpKind::Diffractive);
      cur = leave;
      y_in = exits[j];
      seg_len = transit;
      if (spindle) cone = 1 - cone;
    }
    BCospherePoint end{cur.component, d_last, cur.y, 1.0, 0.0};
    if (spindle && end.x > kPi / 2) end = switch_chart(model, end);
    path.segments.push_back({cur, end, d_last, SegmentKind::Interior});
    if (state_distance(model, end, q) > tol) continue;
    out.verdict = Verdict::True;
    out.witness = std::move(path);
    return out;
  }
  if (spindle) {
    // longer concatenations exist but were not searched
    const double min_len_beyond = d_first + opts.max_jumps * transit + d_last;
    if (t + tol >= min_len_beyond) out.verdict = Verdict::Indeterminate;
  }
  return out;
}

}  // namespace conicwave
