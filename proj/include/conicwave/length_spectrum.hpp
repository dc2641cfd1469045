#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "conicwave/clairaut.hpp"
#include "conicwave/error.hpp"
#include "conicwave/model.hpp"
#include "conicwave/rational.hpp"

namespace conicwave {

enum class GeodesicClass { Smooth, DiffractiveOnly, GeometricThroughCone };
enum class MultiplicityHint { Isolated, OneParameterFamily };

inline std::string_view to_string(GeodesicClass c) {
  switch (c) {
    case GeodesicClass::Smooth: return "smooth";
    case GeodesicClass::DiffractiveOnly: return "diffractive_only";
    case GeodesicClass::GeometricThroughCone: return "geometric_through_cone";
  }
  return "?";
}

inline GeodesicClass parse_geodesic_class(std::string_view s) {
  if (s == "smooth") return GeodesicClass::Smooth;
  if (s == "diffractive_only") return GeodesicClass::DiffractiveOnly;
  if (s == "geometric_through_cone") return GeodesicClass::GeometricThroughCone;
  throw ValidationError("unknown geodesic class '" + std::string(s) + "'");
}

inline std::string_view to_string(MultiplicityHint m) {
  return m == MultiplicityHint::Isolated ? "isolated" : "one_parameter_family";
}

struct ClosedGeodesicRecord {
  double length = 0.0;
  GeodesicClass cls = GeodesicClass::DiffractiveOnly;
  std::string description;
  MultiplicityHint multiplicity = MultiplicityHint::Isolated;
  bool testbed = false;

  bool geometric() const { return cls != GeodesicClass::DiffractiveOnly; }
};

namespace detail {

inline void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
}

inline int strength(GeodesicClass c) {
  switch (c) {
    case GeodesicClass::Smooth: return 2;
    case GeodesicClass::GeometricThroughCone: return 1;
    case GeodesicClass::DiffractiveOnly: return 0;
  }
  return 0;
}

// Sort by length and merge records whose lengths agree to 1e-9 relative.
inline std::vector<ClosedGeodesicRecord> merge_records(std::vector<ClosedGeodesicRecord> in) {
  std::stable_sort(in.begin(), in.end(),
                   [](const auto& a, const auto& b) { return a.length < b.length; });
  std::vector<ClosedGeodesicRecord> out;
  for (auto& r : in) {
    if (!out.empty() && std::abs(out.back().length - r.length) <= 1e-9 * std::max(1.0, r.length)) {
      auto& m = out.back();
      if (strength(r.cls) > strength(m.cls)) m.cls = r.cls;
      if (r.multiplicity == MultiplicityHint::OneParameterFamily) m.multiplicity = r.multiplicity;
      m.testbed = m.testbed || r.testbed;
      m.description += "; " + r.description;
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// A closed chain of `jumps` cone passages is geometric when each passage can
// turn by ±π/α in φ and the turns sum to a multiple of 2π.
inline bool geometric_cycle_closes(const ConicModel& model, int jumps) {
  const double alpha = model.alpha();
  if (alpha < 1.0 - 1e-12) return false;
  if (const auto& r = model.alpha_param().rational()) {
    if (r->num < r->den) return false;
    // S·q ≡ 0 (mod 2p) with S ≡ jumps (mod 2), |S| ≤ jumps
    for (std::int64_t s = -jumps; s <= jumps; s += 2)
      if ((s * r->den) % (2 * r->num) == 0) return true;
    return false;
  }
  for (int s = -jumps; s <= jumps; s += 2) {
    const double turns = s / (2.0 * alpha);
    if (std::abs(turns - std::round(turns)) < 1e-9) return true;
  }
  return false;
}

}  // namespace detail

/// Closed geodesics avoiding the cone points: equator iterates and, when the
/// per-oscillation φ-advance is commensurate with 2π, the family of oscillating ones.
inline std::vector<ClosedGeodesicRecord> smooth_closed_lengths(const ConicModel& model, double horizon) {
  detail::check_horizon(horizon);
  if (model.kind() != ModelKind::Spindle)
    throw ValidationError("smooth closed geodesics are enumerated for the spindle only");
  const double alpha = model.alpha();
  std::vector<ClosedGeodesicRecord> out;

  // representative oscillation; the advance is the same for every Clairaut constant
  const OscillationIntegrals osc = radial_oscillation(model, 0.5 * alpha);
  std::vector<double> family;
  if (const auto& r = model.alpha_param().rational()) {
    const double expected = kTwoPi * static_cast<double>(r->den) / static_cast<double>(r->num);
    if (std::abs(osc.phi_advance - expected) > 1e-8 * expected)
      throw NumericalError("Clairaut quadrature disagrees with the exact advance");
    const double primitive = kTwoPi * static_cast<double>(r->num);
    for (int j = 1; primitive * j <= horizon * (1 + 1e-12); ++j) {
      family.push_back(primitive * j);
      out.push_back({primitive * j, GeodesicClass::Smooth,
                     "family ×" + std::to_string(j) + " (" + std::to_string(r->num) + " oscillations)",
                     MultiplicityHint::OneParameterFamily});
    }
  } else {
    const int kmax = static_cast<int>(horizon / osc.length);
    for (int k = 1; k <= kmax; ++k) {
      const double turns = k * osc.phi_advance / kTwoPi;
      if (std::abs(turns - std::round(turns)) * kTwoPi < 1e-8) {
        family.push_back(k * osc.length);
        out.push_back({k * osc.length, GeodesicClass::Smooth,
                       "family (" + std::to_string(k) + " oscillations)", MultiplicityHint::OneParameterFamily});
      }
    }
  }

  const double equator = kTwoPi * alpha;
  for (int n = 1; equator * n <= horizon * (1 + 1e-12); ++n) {
    out.push_back({equator * n, GeodesicClass::Smooth, "equator ×" + std::to_string(n),
                   MultiplicityHint::Isolated});
  }
  return detail::merge_records(std::move(out));
}

/// Closed diffractive geodesics: meridian concatenations on the spindle
/// merged with the smooth closures; tip bounces on the flat cone (testbed).
inline std::vector<ClosedGeodesicRecord> diffractive_closed_lengths(const ConicModel& model, double horizon) {
  detail::check_horizon(horizon);
  std::vector<ClosedGeodesicRecord> out;
  if (model.kind() == ModelKind::Spindle) {
    // n round trips: 2n pole-to-pole segments of length π, 2n cone passages
    for (int n = 1; kTwoPi * n <= horizon * (1 + 1e-12); ++n) {
      const bool geo = detail::geometric_cycle_closes(model, 2 * n);
      out.push_back({kTwoPi * n, geo ? GeodesicClass::GeometricThroughCone : GeodesicClass::DiffractiveOnly,
                     "meridian ×" + std::to_string(n), MultiplicityHint::OneParameterFamily});
    }
    auto smooth = smooth_closed_lengths(model, horizon);
    out.insert(out.end(), smooth.begin(), smooth.end());
  } else {
    // tip to rim and back, n times; rim reflection is outside the cone-point theory
    const double trip = 2.0 * model.rim_radius();
    for (int n = 1; trip * n <= horizon * (1 + 1e-12); ++n) {
      const bool geo = detail::geometric_cycle_closes(model, n);
      out.push_back({trip * n, geo ? GeodesicClass::GeometricThroughCone : GeodesicClass::DiffractiveOnly,
                     "tip-bounce ×" + std::to_string(n), MultiplicityHint::OneParameterFamily, true});
    }
  }
  return detail::merge_records(std::move(out));
}

/// Lengths of closed diffractive geodesics and the geometric subset.
struct LengthSets {
  std::vector<ClosedGeodesicRecord> dif;
  std::vector<ClosedGeodesicRecord> geo;
};

inline LengthSets length_sets(const ConicModel& model, double horizon) {
  LengthSets s;
  s.dif = diffractive_closed_lengths(model, horizon);
  for (const auto& r : s.dif)
    if (r.geometric()) s.geo.push_back(r);
  return s;
}

inline std::vector<double> lengths_of(const std::vector<ClosedGeodesicRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.length);
  return out;
}

}  // namespace conicwave
