#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "conicwave/flow.hpp"
#include "conicwave/io.hpp"
#include "conicwave/length_spectrum.hpp"
#include "conicwave/rational.hpp"
#include "conicwave/trace.hpp"

namespace conicwave::csv {

inline std::string lengths(const LengthSets& sets) {
  std::string out = "length,set,class,description\n";
  for (const auto& r : sets.dif) {
    out += format_double(r.length) + "," + (r.geometric() ? "DG" : "D") + "," + std::string(to_string(r.cls)) +
           "," + io::quote_csv(r.description + (r.testbed ? " [testbed]" : "")) + "\n";
  }
  return out;
}

inline LengthSets read_lengths(const std::filesystem::path& path) {
  LengthSets sets;
  for (const auto& row : io::read_csv(path, {"length", "set", "class", "description"})) {
    ClosedGeodesicRecord r;
    r.length = io::parse_double(row[0]);
    r.cls = parse_geodesic_class(row[2]);
    r.description = row[3];
    if (row[1] != "D" && row[1] != "DG" && row[1] != "G")
      throw ValidationError("unknown set tag '" + row[1] + "' in '" + path.string() + "'");
    if (row[1] != "G") sets.dif.push_back(r);
    if (row[1] != "D") sets.geo.push_back(r);
  }
  return sets;
}

/// Rows ordered by ε, then t.
inline std::string trace(const TraceSamples& s) {
  std::string out = "t,eps,value\n";
  out.reserve(s.t.size() * s.eps.size() * 56);
  for (std::size_t e = 0; e < s.eps.size(); ++e) {
    const std::string eps = format_double(s.eps[e]);
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      out += format_double(s.t[i]);
      out += ',';
      out += eps;
      out += ',';
      out += format_double(s.values[e][i]);
      out += '\n';
    }
  }
  return out;
}

inline TraceSamples read_trace(const std::filesystem::path& path) {
  TraceSamples s;
  std::map<double, std::size_t> index;
  for (const auto& row : io::read_csv(path, {"t", "eps", "value"})) {
    const double t = io::parse_double(row[0]);
    const double eps = io::parse_double(row[1]);
    auto it = index.find(eps);
    if (it == index.end()) {
      it = index.emplace(eps, s.eps.size()).first;
      s.eps.push_back(eps);
      s.values.emplace_back();
    }
    if (it->second == 0) s.t.push_back(t);
    s.values[it->second].push_back(io::parse_double(row[2]));
  }
  for (const auto& row : s.values)
    if (row.size() != s.t.size()) throw ValidationError("'" + path.string() + "' has ragged eps blocks");
  return s;
}

inline std::string report(const SingularityReport& r) {
  std::string out = "t0,exponent,residual,class,nearest_length,distance\n";
  for (const auto& e : r.entries) {
    out += format_double(e.t0) + "," + format_double(e.exponent) + "," + format_double(e.residual) + "," +
           std::string(to_string(e.cls)) + "," + (e.nearest ? format_double(*e.nearest) : std::string()) + "," +
           format_double(e.distance) + "\n";
  }
  return out;
}

struct FlowRow {
  double s = 0.0;
  BCospherePoint state;
  SegmentKind kind = SegmentKind::Interior;
};

inline std::string flow(const std::vector<FlowRow>& rows) {
  std::string out = "s,x,y,xi_bar,eta_bar,segment_kind\n";
  for (const auto& r : rows) {
    out += format_double(r.s) + "," + format_double(r.state.x) + "," + format_double(r.state.y) + "," +
           format_double(r.state.xi_bar) + "," + format_double(r.state.eta_bar) + "," +
           std::string(to_string(r.kind)) + "\n";
  }
  return out;
}

}  // namespace conicwave::csv
