#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "conicwave/bessel.hpp"
#include "conicwave/error.hpp"
#include "conicwave/io.hpp"
#include "conicwave/model.hpp"
#include "conicwave/parallel.hpp"
#include "conicwave/rational.hpp"

namespace conicwave {

struct EigenEntry {
  std::int32_t m = 0;
  std::int32_t k = 0;
  double nu = 0.0;
  double lambda = 0.0;
  std::int32_t mult = 1;

  friend bool operator==(const EigenEntry&, const EigenEntry&) = default;
};

/// Eigenvalues of the Friedrichs Laplacian with √λ ≤ cutoff, sorted by (λ, m, k).
struct EigenTable {
  std::string descriptor;
  double cutoff = 0.0;
  double area = 0.0;  // used for the Weyl target area/4π
  std::vector<EigenEntry> entries;

  std::int64_t total_multiplicity() const {
    std::int64_t n = 0;
    for (const auto& e : entries) n += e.mult;
    return n;
  }
};

/// Upper bound on table size; beyond it tables are refused rather than built.
inline constexpr std::int64_t kMaxTableEntries = 50'000'000;

namespace detail {

inline void check_cutoff(double cutoff) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw ValidationError("spectral cutoff must be positive");
}

inline void sort_entries(std::vector<EigenEntry>& e) {
  std::stable_sort(e.begin(), e.end(), [](const EigenEntry& a, const EigenEntry& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (a.m != b.m) return a.m < b.m;
    return a.k < b.k;
  });
}

inline std::vector<EigenEntry> concat(std::vector<std::vector<EigenEntry>>& parts) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  std::vector<EigenEntry> all;
  all.reserve(n);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  sort_entries(all);
  return all;
}

}  // namespace detail

/// Spindle spectrum: ν = |m|/α + k, λ = ν(ν + 1). For rational α = p/q the
/// eigenvalue is formed from the integer numerator mq + kp, so it is the
/// correctly rounded value of the exact rational.
inline EigenTable spindle_modes(const Alpha& alpha, double cutoff, unsigned threads = default_threads()) {
  detail::check_cutoff(cutoff);
  const double a = alpha.value();
  const double lmax = cutoff * cutoff;
  const double nu_max = 0.5 * (std::sqrt(1.0 + 4.0 * lmax) - 1.0);
  const double estimate = 0.5 * a * nu_max * nu_max + nu_max;
  if (estimate > static_cast<double>(kMaxTableEntries))
    throw ValidationError("cutoff too large: about " + format_double(std::round(a * lmax)) +
                          " modes (alpha * cutoff^2) exceed the memory budget");

  EigenTable t;
  t.descriptor = ConicModel::spindle(alpha).descriptor();
  t.cutoff = cutoff;
  t.area = 4.0 * kPi * a;

  const auto m_max = static_cast<std::int64_t>(std::floor(a * nu_max)) + 1;
  std::vector<std::vector<EigenEntry>> parts(static_cast<std::size_t>(m_max + 1));
  const auto& exact = alpha.rational();
  parallel_for(parts.size(), threads, [&](std::size_t mi) {
    const auto m = static_cast<std::int64_t>(mi);
    auto& out = parts[mi];
    const std::int32_t mult = m == 0 ? 1 : 2;
    for (std::int64_t k = 0;; ++k) {
      double nu, lambda;
      if (exact) {
        const std::int64_t p = exact->num, q = exact->den;
        const std::int64_t num = m * q + k * p;
        nu = static_cast<double>(num) / static_cast<double>(p);
        lambda = static_cast<double>(num * (num + p)) / static_cast<double>(p * p);
      } else {
        nu = static_cast<double>(m) / a + static_cast<double>(k);
        lambda = nu * (nu + 1.0);
      }
      if (lambda > lmax) break;
      out.push_back({static_cast<std::int32_t>(m), static_cast<std::int32_t>(k), nu, lambda, mult});
    }
  });
  t.entries = detail::concat(parts);
  return t;
}

/// Flat cone of radius R with Dirichlet or Neumann rim: λ = (j/R)² over the
/// zeros j of J_{m/α} (or of its derivative). Neumann adds the constant mode.
inline EigenTable flat_cone_modes(const Alpha& alpha, double rim_radius, RimCondition bc, double cutoff,
                                  unsigned threads = default_threads()) {
  detail::check_cutoff(cutoff);
  const ConicModel model = ConicModel::flat_cone(alpha, rim_radius, bc);
  const double a = alpha.value();
  const double x_max = cutoff * rim_radius;
  const double estimate = a * x_max * x_max / 8.0;
  if (estimate > static_cast<double>(kMaxTableEntries))
    throw ValidationError("cutoff too large: about " + format_double(std::round(estimate)) +
                          " modes exceed the memory budget");
  EigenTable t;
  t.descriptor = model.descriptor();
  t.cutoff = cutoff;
  t.area = model.area();

  const auto m_max = static_cast<std::int64_t>(std::floor(a * x_max)) + 1;
  const auto kind = bc == RimCondition::Dirichlet ? bessel::ZeroKind::Function : bessel::ZeroKind::Derivative;
  const auto& exact = alpha.rational();
  std::vector<std::vector<EigenEntry>> parts(static_cast<std::size_t>(m_max + 1));
  parallel_for(parts.size(), threads, [&](std::size_t mi) {
    const auto m = static_cast<std::int64_t>(mi);
    const double nu = exact ? static_cast<double>(m * exact->den) / static_cast<double>(exact->num)
                            : static_cast<double>(m) / a;
    auto& out = parts[mi];
    const std::int32_t mult = m == 0 ? 1 : 2;
    // k counts from 0; for Neumann the constant mode takes k = 0 at order 0
    std::int32_t k = 0;
    if (m == 0 && bc == RimCondition::Neumann) out.push_back({0, k++, 0.0, 0.0, 1});
    const auto zs = bessel::zeros_below(nu, x_max, kind);
    for (double z : zs) {
      const double lambda = (z / rim_radius) * (z / rim_radius);
      if (lambda <= cutoff * cutoff) out.push_back({static_cast<std::int32_t>(m), k, nu, lambda, mult});
      ++k;
    }
  });
  t.entries = detail::concat(parts);
  return t;
}

inline EigenTable build_table(const ConicModel& model, double cutoff, unsigned threads = default_threads()) {
  if (model.kind() == ModelKind::Spindle) return spindle_modes(model.alpha_param(), cutoff, threads);
  return flat_cone_modes(model.alpha_param(), model.rim_radius(), model.rim_condition(), cutoff, threads);
}

struct WeylFit {
  double slope = 0.0;
  double target = 0.0;
  double deviation = 0.0;  // |slope − target| / target
};

/// Least-squares slope of the counting function N(λ) over the top half of
/// the table, against the leading Weyl coefficient area/4π.
inline WeylFit weyl_fit(const EigenTable& t) {
  if (t.entries.size() < 10'000) throw ValidationError("Weyl fit needs at least 10^4 table entries");
  const std::size_t n = t.entries.size();
  std::vector<double> counts(n);
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += t.entries[i].mult;
    counts[i] = running;
  }
  const std::size_t lo = n / 2;
  double sx = 0, sy = 0;
  for (std::size_t i = lo; i < n; ++i) {
    sx += t.entries[i].lambda;
    sy += counts[i];
  }
  const double cnt = static_cast<double>(n - lo);
  const double mx = sx / cnt, my = sy / cnt;
  double sxy = 0, sxx = 0;
  for (std::size_t i = lo; i < n; ++i) {
    const double dx = t.entries[i].lambda - mx;
    sxy += dx * (counts[i] - my);
    sxx += dx * dx;
  }
  WeylFit f;
  f.slope = sxy / sxx;
  f.target = t.area / (4.0 * kPi);
  f.deviation = std::abs(f.slope - f.target) / f.target;
  return f;
}

/// Zeros increase along each order, and for orders ν < ν′ in the table the
/// k-th zero increases with the order; when ν′ − ν ≤ 1 it also stays below
/// the (k+1)-th zero of order ν.
inline bool check_interlacing(const EigenTable& t) {
  std::vector<std::vector<double>> by_m;
  std::vector<double> orders;
  for (const auto& e : t.entries) {
    if (static_cast<std::size_t>(e.m) >= by_m.size()) {
      by_m.resize(e.m + 1);
      orders.resize(e.m + 1, -1.0);
    }
    orders[e.m] = e.nu;
    by_m[e.m].push_back(std::sqrt(e.lambda));
  }
  for (auto& zs : by_m) {
    // entries are sorted by λ, hence by k within an order
    for (std::size_t i = 1; i < zs.size(); ++i)
      if (!(zs[i] > zs[i - 1])) return false;
  }
  for (std::size_t m = 0; m + 1 < by_m.size(); ++m) {
    const auto& lo = by_m[m];
    const auto& hi = by_m[m + 1];
    if (lo.empty() || hi.empty()) continue;
    const bool tight = orders[m + 1] - orders[m] <= 1.0 + 1e-12;
    for (std::size_t k = 0; k < hi.size() && k < lo.size(); ++k) {
      if (!(lo[k] < hi[k])) return false;
      if (tight && k + 1 < lo.size() && !(hi[k] < lo[k + 1])) return false;
    }
  }
  return true;
}

// ---- persistence

inline std::string table_csv(const EigenTable& t) {
  std::string out = "m,k,nu,lambda,mult\n";
  out.reserve(t.entries.size() * 48);
  for (const auto& e : t.entries) {
    out += std::to_string(e.m);
    out += ',';
    out += std::to_string(e.k);
    out += ',';
    out += format_double(e.nu);
    out += ',';
    out += format_double(e.lambda);
    out += ',';
    out += std::to_string(e.mult);
    out += '\n';
  }
  return out;
}

/// Reads entries back from CSV; descriptor, cutoff and area come from the caller.
inline std::vector<EigenEntry> read_table_csv(const std::filesystem::path& path) {
  const auto rows = io::read_csv(path, {"m", "k", "nu", "lambda", "mult"});
  std::vector<EigenEntry> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    EigenEntry e;
    e.m = static_cast<std::int32_t>(io::parse_int(r[0]));
    e.k = static_cast<std::int32_t>(io::parse_int(r[1]));
    e.nu = io::parse_double(r[2]);
    e.lambda = io::parse_double(r[3]);
    e.mult = static_cast<std::int32_t>(io::parse_int(r[4]));
    if (e.lambda < 0.0 || e.mult < 1) throw ValidationError("invalid eigenvalue row in '" + path.string() + "'");
    out.push_back(e);
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].lambda < out[i - 1].lambda) throw ValidationError("'" + path.string() + "' is not sorted by lambda");
  return out;
}

namespace detail {

inline std::string cache_key(const std::string& descriptor, double cutoff) {
  return descriptor + ";cutoff=" + format_double(cutoff);
}

template <class T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::string_view& buf, T& v) {
  if (buf.size() < sizeof v) return false;
  std::memcpy(&v, buf.data(), sizeof v);
  buf.remove_prefix(sizeof v);
  return true;
}

}  // namespace detail

inline std::filesystem::path cache_path(const std::filesystem::path& dir, const ConicModel& model, double cutoff) {
  return dir / ("eigs-" + io::hex64(io::fnv1a64(detail::cache_key(model.descriptor(), cutoff))) + ".bin");
}

/// Binary cache layout: key length, key, area, entry count, entries, checksum of
/// everything before it.
inline void save_cache(const std::filesystem::path& path, const EigenTable& t) {
  std::string buf = "CWEIG1";
  const std::string key = detail::cache_key(t.descriptor, t.cutoff);
  detail::put(buf, static_cast<std::uint64_t>(key.size()));
  buf += key;
  detail::put(buf, t.area);
  detail::put(buf, static_cast<std::uint64_t>(t.entries.size()));
  for (const auto& e : t.entries) {
    detail::put(buf, e.m);
    detail::put(buf, e.k);
    detail::put(buf, e.nu);
    detail::put(buf, e.lambda);
    detail::put(buf, e.mult);
  }
  detail::put(buf, io::fnv1a64(buf));
  io::write_atomic(path, buf);
}

/// Returns the cached table when the file exists, matches the key and passes
/// its checksum; std::nullopt otherwise.
inline std::optional<EigenTable> load_cache(const std::filesystem::path& path, const ConicModel& model,
                                            double cutoff) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  const std::string raw = io::read_file(path);
  if (raw.size() < 6 + 8 || raw.compare(0, 6, "CWEIG1") != 0) return std::nullopt;
  std::uint64_t stored = 0;
  std::memcpy(&stored, raw.data() + raw.size() - 8, 8);
  if (io::fnv1a64(std::string_view(raw).substr(0, raw.size() - 8)) != stored) return std::nullopt;

  std::string_view buf(raw);
  buf.remove_prefix(6);
  std::uint64_t klen = 0, count = 0;
  if (!detail::get(buf, klen) || buf.size() < klen) return std::nullopt;
  const std::string key(buf.substr(0, klen));
  buf.remove_prefix(klen);
  if (key != detail::cache_key(model.descriptor(), cutoff)) return std::nullopt;
  EigenTable t;
  t.descriptor = model.descriptor();
  t.cutoff = cutoff;
  if (!detail::get(buf, t.area) || !detail::get(buf, count)) return std::nullopt;
  t.entries.resize(count);
  for (auto& e : t.entries) {
    if (!detail::get(buf, e.m) || !detail::get(buf, e.k) || !detail::get(buf, e.nu) ||
        !detail::get(buf, e.lambda) || !detail::get(buf, e.mult))
      return std::nullopt;
  }
  return t;
}

/// Table for a model, served from `cache_dir` when a verified entry exists.
inline EigenTable cached_table(const ConicModel& model, double cutoff, const std::filesystem::path& cache_dir,
                               unsigned threads = default_threads()) {
  const auto path = cache_path(cache_dir, model, cutoff);
  if (auto hit = load_cache(path, model, cutoff)) return *std::move(hit);
  EigenTable t = build_table(model, cutoff, threads);
  save_cache(path, t);
  return t;
}

}  // namespace conicwave
