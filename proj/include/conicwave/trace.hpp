#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conicwave/error.hpp"
#include "conicwave/length_spectrum.hpp"
#include "conicwave/model.hpp"
#include "conicwave/parallel.hpp"
#include "conicwave/spectrum.hpp"

namespace conicwave {

/// Pairwise sum with a fixed split, so the result depends only on the input order.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

/// log-spaced ε values from eps_min to eps_max inclusive.
inline std::vector<double> eps_ladder(double eps_min, double eps_max, int count) {
  if (!(eps_min > 0.0) || !(eps_max >= eps_min) || count < 1)
    throw ValidationError("eps ladder needs 0 < eps_min <= eps_max and count >= 1");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out[i] = eps_min * std::pow(eps_max / eps_min, f);
  }
  out.back() = eps_max;
  return out;
}

/// Uniform grid 0, dt, ..., up to t_max.
inline std::vector<double> uniform_grid(double t_max, double dt) {
  if (!(t_max >= 0.0) || !(dt > 0.0)) throw ValidationError("time grid needs t_max >= 0 and dt > 0");
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

/// Gaussian-smoothed wave trace T_ε(t) = Σ mult · exp(−ε²λ/2) · cos(t√λ) on a
/// time grid, one row per ε.
struct TraceSamples {
  std::vector<double> t;
  std::vector<double> eps;
  std::vector<std::vector<double>> values;  // values[e][i] at eps[e], t[i]

  std::size_t eps_index(double e) const {
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (eps[i] == e) return i;
    throw ValidationError("eps value not in trace samples");
  }
};

/// Smallest ε for which the Gaussian weight has decayed enough at the cutoff.
inline double min_eps_for(double cutoff) { return 8.0 / cutoff; }

inline TraceSamples smoothed_wave_trace(const EigenTable& table, const std::vector<double>& t,
                                        const std::vector<double>& eps, unsigned threads = default_threads(),
                                        bool check_tail = true) {
  if (eps.empty()) throw ValidationError("empty eps ladder");
  for (double e : eps) {
    if (!(e > 0.0)) throw ValidationError("eps must be positive");
    if (check_tail && e < min_eps_for(table.cutoff) * (1.0 - 1e-12))
      throw ValidationError("tail condition violated: eps " + format_double(e) + " < 8/cutoff = " +
                            format_double(min_eps_for(table.cutoff)));
  }
  const std::size_t n = table.entries.size();
  std::vector<double> freq(n);
  std::vector<std::vector<double>> weight(eps.size(), std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    freq[j] = std::sqrt(table.entries[j].lambda);
    for (std::size_t e = 0; e < eps.size(); ++e)
      weight[e][j] = table.entries[j].mult * std::exp(-0.5 * eps[e] * eps[e] * table.entries[j].lambda);
  }
  TraceSamples out;
  out.t = t;
  out.eps = eps;
  out.values.assign(eps.size(), std::vector<double>(t.size(), 0.0));
  constexpr std::size_t block = 64;
  const std::size_t blocks = (t.size() + block - 1) / block;
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::vector<double> cosines(n);
    std::vector<double> terms(n);
    for (std::size_t i = b * block; i < std::min(t.size(), (b + 1) * block); ++i) {
      for (std::size_t j = 0; j < n; ++j) cosines[j] = std::cos(t[i] * freq[j]);
      for (std::size_t e = 0; e < eps.size(); ++e) {
        for (std::size_t j = 0; j < n; ++j) terms[j] = weight[e][j] * cosines[j];
        out.values[e][i] = pairwise_sum(terms.data(), n);
      }
    }
  });
  return out;
}

/// Σ mult · exp(−λτ).
inline double heat_trace(const EigenTable& table, double tau) {
  if (!(tau > 0.0)) throw ValidationError("heat trace needs tau > 0");
  if (table.cutoff * table.cutoff * tau < 40.0)
    throw ValidationError("tail condition violated: cutoff^2 * tau must be at least 40");
  std::vector<double> terms(table.entries.size());
  for (std::size_t j = 0; j < terms.size(); ++j)
    terms[j] = table.entries[j].mult * std::exp(-table.entries[j].lambda * tau);
  return pairwise_sum(terms.data(), terms.size());
}

struct ExponentFit {
  double exponent = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  bool degenerate = false;
  std::vector<double> peaks;        // max |T_ε| in the window, per ε
  std::vector<double> peak_times;   // where it was attained, per ε
};

inline constexpr double kNoiseFloor = 1e-9;

/// a = −slope of log(max_{|t−t₀| ≤ window} |T_ε(t)|) against log ε.
inline ExponentFit scaling_exponent(const TraceSamples& s, double t0, double window) {
  if (s.eps.size() < 6) throw ValidationError("exponent fit needs at least 6 eps values");
  if (!(window > 0.0)) throw ValidationError("window must be positive");
  ExponentFit fit;
  std::vector<double> lx, ly;
  for (std::size_t e = 0; e < s.eps.size(); ++e) {
    double best = -1.0, at = t0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (std::abs(s.t[i] - t0) > window + 1e-12) continue;
      const double v = std::abs(s.values[e][i]);
      if (v > best) {
        best = v;
        at = s.t[i];
      }
    }
    if (best < 0.0) throw ValidationError("window around t0 contains no samples");
    fit.peaks.push_back(best);
    fit.peak_times.push_back(at);
    if (best < kNoiseFloor) fit.degenerate = true;
    lx.push_back(std::log(s.eps[e]));
    ly.push_back(std::log(std::max(best, 1e-300)));
  }
  if (fit.degenerate) return fit;
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (my + slope * (lx[i] - mx));
    rss += r * r;
  }
  fit.exponent = -slope;
  fit.residual = std::sqrt(rss / n);
  return fit;
}

enum class SingularClass { Regular, DiffractiveOnly, Geometric };

inline std::string_view to_string(SingularClass c) {
  switch (c) {
    case SingularClass::Regular: return "regular";
    case SingularClass::DiffractiveOnly: return "diffractive_only";
    case SingularClass::Geometric: return "geometric";
  }
  return "?";
}

struct ScanParams {
  double t_min = 0.5;
  double horizon = 13.0;
  double window = 0.05;
  double threshold = 0.5;
  double match_tol = 0.02;
  double off_geo_slack = 0.2;  // exponent bound 1 + slack away from Geo
  double origin_target = 2.0;
  double origin_tol = 0.1;
};

struct SingularityEntry {
  double t0 = 0.0;
  double exponent = 0.0;
  double residual = 0.0;
  SingularClass cls = SingularClass::Regular;
  std::optional<double> nearest;  // nearest element of Dif ∪ {0}
  double distance = 0.0;
  bool detected = false;  // found by the scan rather than probed at a predicted length
};

struct SingularityReport {
  std::vector<SingularityEntry> entries;
  ScanParams params;
  bool insufficient_data = false;
  bool no_singularity_off_dif = false;
  bool bounded_off_geo = false;
  bool origin_matches = false;
  bool all_dif_detected = false;
  double origin_exponent = 0.0;
};

namespace detail {

// Where the window maximum would sit as ε → 0: linear fit of the peak time
// against ε over the smallest ε values, refined with a parabola through the
// three samples around each peak.
inline double localize(const TraceSamples& s, double t0, double window, std::size_t use = 4) {
  std::vector<std::size_t> order(s.eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.eps[a] < s.eps[b]; });
  use = std::min(use, order.size());
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < use; ++r) {
    const auto& row = s.values[order[r]];
    std::size_t best = 0;
    double bv = -1.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (std::abs(s.t[i] - t0) > window + 1e-12) continue;
      if (std::abs(row[i]) > bv) {
        bv = std::abs(row[i]);
        best = i;
      }
    }
    double tp = s.t[best];
    if (best > 0 && best + 1 < s.t.size()) {
      const double y0 = std::abs(row[best - 1]), y1 = std::abs(row[best]), y2 = std::abs(row[best + 1]);
      const double den = y0 - 2.0 * y1 + y2;
      if (den < 0.0) tp += 0.5 * (y0 - y2) / den * (s.t[best + 1] - s.t[best]);
    }
    xs.push_back(s.eps[order[r]]);
    ys.push_back(tp);
  }
  if (xs.size() < 2) return ys.empty() ? t0 : ys.front();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= xs.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return my - (sxx > 0 ? sxy / sxx : 0.0) * mx;
}

inline std::optional<double> nearest_of(const std::vector<double>& v, double t) {
  std::optional<double> best;
  for (double x : v)
    if (!best || std::abs(x - t) < std::abs(*best - t)) best = x;
  return best;
}

}  // namespace detail

/// Scans (t_min, horizon] for times with exponent above the threshold,
/// localizes each cluster, classifies it against Dif and Geo, and probes
/// t = 0 and every element of Dif in range.
inline SingularityReport singularity_report(const TraceSamples& s, const LengthSets& sets,
                                            const ScanParams& p = {}) {
  SingularityReport rep;
  rep.params = p;
  if (s.t.empty() || s.eps.size() < 6 || s.values.empty()) {
    rep.insufficient_data = true;
    return rep;
  }
  bool any_signal = false;
  for (const auto& row : s.values)
    for (double v : row)
      if (std::abs(v) >= kNoiseFloor) any_signal = true;
  if (!any_signal) {
    rep.insufficient_data = true;
    return rep;
  }

  std::vector<double> dif{0.0};
  for (double l : lengths_of(sets.dif)) dif.push_back(l);
  std::vector<double> geo{0.0};
  for (double l : lengths_of(sets.geo)) geo.push_back(l);
  // class records membership of t₀ in Geo, Dif \ Geo, or neither; the
  // exponent carries the measured strength
  auto classify = [&](SingularityEntry& e) {
    e.nearest = detail::nearest_of(dif, e.t0);
    e.distance = e.nearest ? std::abs(*e.nearest - e.t0) : INFINITY;
    const auto g = detail::nearest_of(geo, e.t0);
    if (g && std::abs(*g - e.t0) <= p.match_tol) e.cls = SingularClass::Geometric;
    else if (e.distance <= p.match_tol) e.cls = SingularClass::DiffractiveOnly;
    else e.cls = SingularClass::Regular;
  };

  // scan grid points in range
  std::vector<std::pair<double, ExponentFit>> hot;
  for (double t : s.t) {
    if (t <= p.t_min || t > p.horizon + 1e-12) continue;
    auto fit = scaling_exponent(s, t, p.window);
    if (!fit.degenerate && fit.exponent > p.threshold) hot.emplace_back(t, std::move(fit));
  }
  // clusters of consecutive hot points; one entry per cluster at its strongest point
  const double dt = s.t.size() > 1 ? s.t[1] - s.t[0] : 1.0;
  for (std::size_t i = 0; i < hot.size();) {
    std::size_t j = i, best = i;
    while (j + 1 < hot.size() && hot[j + 1].first - hot[j].first <= 1.5 * dt) {
      ++j;
      if (hot[j].second.exponent > hot[best].second.exponent) best = j;
    }
    SingularityEntry e;
    e.t0 = detail::localize(s, hot[best].first, p.window);
    const auto fit = scaling_exponent(s, e.t0, p.window);
    e.exponent = fit.exponent;
    e.residual = fit.residual;
    e.detected = true;
    classify(e);
    rep.entries.push_back(e);
    i = j + 1;
  }

  // probes
  const auto origin = scaling_exponent(s, 0.0, p.window);
  rep.origin_exponent = origin.exponent;
  {
    SingularityEntry e;
    e.t0 = 0.0;
    e.exponent = origin.exponent;
    e.residual = origin.residual;
    classify(e);
    rep.entries.push_back(e);
  }
  rep.origin_matches = !origin.degenerate && std::abs(origin.exponent - p.origin_target) <= p.origin_tol;
  rep.all_dif_detected = true;
  for (double l : lengths_of(sets.dif)) {
    if (l <= p.t_min || l > p.horizon) continue;
    bool found = false;
    for (const auto& e : rep.entries)
      if (e.detected && std::abs(e.t0 - l) <= p.match_tol) found = true;
    if (!found) rep.all_dif_detected = false;
    SingularityEntry probe;
    const auto fit = scaling_exponent(s, l, p.window);
    probe.t0 = l;
    probe.exponent = fit.exponent;
    probe.residual = fit.residual;
    classify(probe);
    rep.entries.push_back(probe);
  }
  std::stable_sort(rep.entries.begin(), rep.entries.end(),
                   [](const auto& a, const auto& b) { return a.t0 < b.t0; });

  rep.no_singularity_off_dif = true;
  rep.bounded_off_geo = true;
  for (const auto& e : rep.entries) {
    if (e.detected && e.distance > p.match_tol) rep.no_singularity_off_dif = false;
    if (e.cls != SingularClass::Geometric && e.exponent > 1.0 + p.off_geo_slack) rep.bounded_off_geo = false;
  }
  return rep;
}

}  // namespace conicwave
