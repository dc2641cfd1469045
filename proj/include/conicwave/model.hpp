#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "conicwave/error.hpp"
#include "conicwave/rational.hpp"

namespace conicwave {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle into [0, 2π).
inline double wrap_angle(double y) {
  double r = std::fmod(y, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed angular difference b - a mapped into (-π, π].
inline double angle_diff(double a, double b) {
  double d = std::remainder(b - a, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

enum class ModelKind { Spindle, FlatCone };
enum class RimCondition { Dirichlet, Neumann };

inline std::string_view to_string(ModelKind k) { return k == ModelKind::Spindle ? "spindle" : "flatcone"; }
inline std::string_view to_string(RimCondition c) {
  return c == RimCondition::Dirichlet ? "dirichlet" : "neumann";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "spindle") return ModelKind::Spindle;
  if (s == "flatcone") return ModelKind::FlatCone;
  throw ValidationError("unknown model kind '" + std::string(s) + "' (expected spindle|flatcone)");
}

inline RimCondition parse_rim_condition(std::string_view s) {
  if (s == "dirichlet") return RimCondition::Dirichlet;
  if (s == "neumann") return RimCondition::Neumann;
  throw ValidationError("unknown boundary condition '" + std::string(s) + "' (expected dirichlet|neumann)");
}

/// Circle cross-section with metric α² dφ².
struct CrossSection {
  double alpha = 1.0;

  double circumference() const { return kTwoPi * alpha; }

  /// h₀-distance between two points of the circle.
  double distance(double y1, double y2) const {
    const double d = std::abs(angle_diff(y1, y2));
    return alpha * std::min(d, kTwoPi - d);
  }
};

/// Parameters accepted by ConicModel::build.
struct ModelSpec {
  std::string kind = "spindle";
  std::string alpha = "1";
  double rim_radius = 1.0;
  std::string bc = "dirichlet";
};

/// A two-dimensional conic surface of revolution, g = dθ² + a(θ)² dφ².
///
/// The spindle has a(θ) = α sin θ on [0, π] with cone points at both ends;
/// the flat cone has a(x) = αx on (0, rim_radius] with a single tip.
/// Each cone point owns a chart whose radial coordinate x is the distance to
/// it, in which the metric takes the product form dx² + x² h(x) with
/// h = (a(x)/x)² dφ².
class ConicModel {
 public:
  static ConicModel spindle(Alpha alpha) {
    ConicModel m;
    m.kind_ = ModelKind::Spindle;
    m.alpha_ = alpha;
    return m;
  }

  static ConicModel flat_cone(Alpha alpha, double rim_radius = 1.0,
                              RimCondition bc = RimCondition::Dirichlet) {
    if (!(rim_radius > 0.0) || !std::isfinite(rim_radius))
      throw ValidationError("flat cone rim_radius must be positive");
    ConicModel m;
    m.kind_ = ModelKind::FlatCone;
    m.alpha_ = alpha;
    m.rim_radius_ = rim_radius;
    m.bc_ = bc;
    return m;
  }

  static ConicModel build(const ModelSpec& spec) {
    const ModelKind kind = parse_model_kind(spec.kind);
    const Alpha alpha = Alpha::parse(spec.alpha);
    if (kind == ModelKind::Spindle) return spindle(alpha);
    return flat_cone(alpha, spec.rim_radius, parse_rim_condition(spec.bc));
  }

  ModelKind kind() const { return kind_; }
  const Alpha& alpha_param() const { return alpha_; }
  double alpha() const { return alpha_.value(); }
  double rim_radius() const { return rim_radius_; }
  RimCondition rim_condition() const { return bc_; }
  static constexpr int dimension() { return 2; }
  int cone_point_count() const { return kind_ == ModelKind::Spindle ? 2 : 1; }
  CrossSection cross_section() const { return {alpha()}; }

  /// Upper end of the global coordinate range (π for the spindle, the rim radius otherwise).
  double coordinate_max() const { return kind_ == ModelKind::Spindle ? kPi : rim_radius_; }

  /// Profile a(θ) in the global coordinate.
  double profile(double theta) const {
    if (!(theta >= 0.0 && theta <= coordinate_max()))
      throw ValidationError("coordinate " + format_double(theta) + " outside model range");
    return kind_ == ModelKind::Spindle ? alpha() * std::sin(theta) : alpha() * theta;
  }

  /// Profile expressed in a cone-point chart coordinate x (distance to that cone point).
  double chart_profile(double x) const {
    return kind_ == ModelKind::Spindle ? alpha() * std::sin(x) : alpha() * x;
  }

  double chart_profile_derivative(double x) const {
    return kind_ == ModelKind::Spindle ? alpha() * std::cos(x) : alpha();
  }

  /// x / a(x), the factor relating the b-fibre η̄ to the cross-section dual metric.
  double chart_ratio(double x) const {
    if (kind_ == ModelKind::FlatCone || x == 0.0) return 1.0 / alpha();
    return x / (alpha() * std::sin(x));
  }

  /// Global coordinate θ of a chart point.
  double global_coordinate(int component, double x) const {
    return (kind_ == ModelKind::Spindle && component == 1) ? kPi - x : x;
  }

  void check_component(int component) const {
    if (component < 0 || component >= cone_point_count())
      throw ValidationError("invalid cone point component " + std::to_string(component));
  }

  /// Canonical text key identifying the model; used in manifests and caches.
  std::string descriptor() const {
    std::string d = std::string(to_string(kind_)) + ";alpha=" + alpha_.to_string();
    if (kind_ == ModelKind::FlatCone)
      d += ";rim=" + format_double(rim_radius_) + ";bc=" + std::string(to_string(bc_));
    return d;
  }

  /// Area of the surface.
  double area() const {
    return kind_ == ModelKind::Spindle ? 4.0 * kPi * alpha() : kPi * alpha() * rim_radius_ * rim_radius_;
  }

 private:
  ConicModel() = default;

  ModelKind kind_ = ModelKind::Spindle;
  Alpha alpha_ = Alpha::exact(1, 1);
  double rim_radius_ = 1.0;
  RimCondition bc_ = RimCondition::Dirichlet;
};

/// Point of the rescaled b-cosphere bundle in the chart of cone point `component`.
///
/// ξ̄ is the unit-speed radial velocity dx/ds and η̄ = L/x where L = a² dφ/ds is
/// the Clairaut constant; the constraint reads ξ̄² + (x/a)² η̄² = 1.
struct BCospherePoint {
  int component = 0;
  double x = 0.0;
  double y = 0.0;
  double xi_bar = 0.0;
  double eta_bar = 0.0;
};

/// c(p) = ξ̄² + h(x)(η̄, η̄).
inline double constraint(const ConicModel& model, const BCospherePoint& p) {
  const double r = model.chart_ratio(p.x) * p.eta_bar;
  return p.xi_bar * p.xi_bar + r * r;
}

/// Clairaut constant L = a(x)² dφ/ds, invariant along interior geodesics.
inline double clairaut_constant(const BCospherePoint& p) { return p.eta_bar * p.x; }

/// Builds an interior point from a heading ψ measured from the outward radial
/// direction (ψ = 0 moves away from the cone point, ψ = π/2 moves along +φ).
inline BCospherePoint make_point(const ConicModel& model, int component, double x, double y,
                                 double heading) {
  model.check_component(component);
  if (!(x > 0.0) || x > model.coordinate_max())
    throw ValidationError("interior point requires 0 < x <= coordinate range");
  if (model.kind() == ModelKind::Spindle && x > kPi / 2) {
    // express in the chart of the nearer cone point
    component = 1 - component;
    x = kPi - x;
    heading = kPi - heading;
  }
  BCospherePoint p{component, x, wrap_angle(y), std::cos(heading), 0.0};
  double tangential = std::sin(heading);
  if (std::abs(tangential) < 4e-16) tangential = 0.0;  // heading a multiple of π up to rounding: a meridian
  p.eta_bar = tangential / model.chart_ratio(x);
  // absorb rounding so the constraint holds exactly at construction
  BCospherePoint best = p;
  double best_defect = std::abs(constraint(model, p) - 1.0);
  for (int i = 0; i < 4 && best_defect > 0.0; ++i) {
    const double s = 1.0 / std::sqrt(constraint(model, p));
    p.xi_bar *= s;
    p.eta_bar *= s;
    const double d = std::abs(constraint(model, p) - 1.0);
    if (d < best_defect) {
      best = p;
      best_defect = d;
    }
  }
  return best;
}

/// Re-expresses a spindle point in the other cone point's chart.
inline BCospherePoint switch_chart(const ConicModel& model, const BCospherePoint& p) {
  if (model.kind() != ModelKind::Spindle) return p;
  BCospherePoint q = p;
  q.component = 1 - p.component;
  q.x = kPi - p.x;
  q.xi_bar = -p.xi_bar;
  q.eta_bar = q.x > 0.0 ? p.eta_bar * p.x / q.x : 0.0;
  return q;
}

/// Global description of a state: coordinate θ, angle φ, and the unit velocity
/// split into dθ/ds and the cross-section component a dφ/ds.
struct GlobalState {
  double theta = 0.0;
  double phi = 0.0;
  double v_theta = 0.0;
  double v_perp = 0.0;
};

inline GlobalState to_global(const ConicModel& model, const BCospherePoint& p) {
  GlobalState g;
  g.theta = model.global_coordinate(p.component, p.x);
  g.phi = p.y;
  const bool flipped = model.kind() == ModelKind::Spindle && p.component == 1;
  g.v_theta = flipped ? -p.xi_bar : p.xi_bar;
  g.v_perp = model.chart_ratio(p.x) * p.eta_bar;
  return g;
}

inline BCospherePoint from_global(const ConicModel& model, const GlobalState& g) {
  BCospherePoint p;
  if (model.kind() == ModelKind::Spindle && g.theta > kPi / 2) {
    p.component = 1;
    p.x = kPi - g.theta;
    p.xi_bar = -g.v_theta;
  } else {
    p.component = 0;
    p.x = g.theta;
    p.xi_bar = g.v_theta;
  }
  p.y = wrap_angle(g.phi);
  p.eta_bar = p.x > 0.0 ? g.v_perp / model.chart_ratio(p.x) : 0.0;
  return p;
}

/// Chart-independent distance between two states: positional distance in the
/// metric plus the sup-difference of the unit velocities.
inline double state_distance(const ConicModel& model, const BCospherePoint& a, const BCospherePoint& b) {
  const GlobalState ga = to_global(model, a);
  const GlobalState gb = to_global(model, b);
  const double radius = model.chart_profile(0.5 * (ga.theta + gb.theta));
  const double dtheta = ga.theta - gb.theta;
  const double dphi = radius * angle_diff(ga.phi, gb.phi);
  const double pos = std::hypot(dtheta, dphi);
  const double vel = std::max(std::abs(ga.v_theta - gb.v_theta), std::abs(ga.v_perp - gb.v_perp));
  return std::max(pos, vel);
}

}  // namespace conicwave
