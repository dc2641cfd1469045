#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conicwave/error.hpp"
#include "conicwave/io.hpp"
#include "conicwave/model.hpp"
#include "conicwave/rational.hpp"

namespace conicwave {

/// Flat "key = value" text with "[section]" headers and '#' comments. Keys
/// before the first header belong to the section "run".
class KeyValueDoc {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static KeyValueDoc parse(std::string_view text) {
    KeyValueDoc doc;
    std::string section = "run";
    std::size_t line_no = 0;
    while (!text.empty()) {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3)
          throw ValidationError("config line " + std::to_string(line_no) + ": malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
      const auto key = trim(line.substr(0, eq));
      if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
      doc.set(section, std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return doc;
  }

  void set(const std::string& section, const std::string& key, std::string value) {
    auto& s = section_ref(section);
    for (auto& kv : s)
      if (kv.first == key) {
        kv.second = std::move(value);
        return;
      }
    s.emplace_back(key, std::move(value));
  }

  const std::string* get(const std::string& section, const std::string& key) const {
    for (const auto& [name, s] : sections_)
      if (name == section)
        for (const auto& kv : s)
          if (kv.first == key) return &kv.second;
    return nullptr;
  }

  const std::vector<std::pair<std::string, Section>>& sections() const { return sections_; }

  std::string to_text() const {
    std::string out;
    for (const auto& [name, s] : sections_) {
      if (!out.empty()) out += '\n';
      out += "[" + name + "]\n";
      for (const auto& [k, v] : s) out += k + " = " + v + "\n";
    }
    return out;
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  Section& section_ref(const std::string& name) {
    for (auto& [n, s] : sections_)
      if (n == name) return s;
    sections_.emplace_back(name, Section{});
    return sections_.back().second;
  }

  std::vector<std::pair<std::string, Section>> sections_;
};

struct RunConfig {
  // model
  std::string model = "spindle";
  std::string alpha = "2/3";
  double rim_radius = 1.0;
  std::string bc = "dirichlet";
  // spectral
  double lambda_max = 202500.0;
  // lengths
  double horizon = 13.0;
  // trace
  double tmax = 13.0;
  double dt = 0.005;
  double eps_min = 0.02;
  double eps_max = 0.2;
  int eps_count = 8;
  double window = 0.05;
  double threshold = 0.5;
  double match_tol = 0.02;
  double t_min = 0.5;
  // io
  std::string out;
  std::string cache_dir;
  // run
  unsigned threads = 0;  // 0: hardware parallelism

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  ModelSpec model_spec() const { return {model, alpha, rim_radius, bc}; }
  double cutoff() const { return std::sqrt(lambda_max); }

  /// Positive tolerances and a ladder compatible with the cutoff.
  /// Field checks; the tail condition eps_min >= 8/sqrt(lambda_max) only
  /// when `check_tail` is set, since only the trace uses the ladder.
  void validate(bool check_tail = true) const {
    ConicModel::build(model_spec());
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
    };
    positive(lambda_max, "lambda_max");
    positive(horizon, "horizon");
    positive(tmax, "tmax");
    positive(dt, "dt");
    positive(eps_min, "eps_min");
    positive(eps_max, "eps_max");
    positive(window, "window");
    positive(threshold, "threshold");
    positive(match_tol, "match_tol");
    positive(t_min, "t_min");
    if (eps_max < eps_min) throw ValidationError("eps_max must be at least eps_min");
    if (eps_count < 1) throw ValidationError("eps_count must be at least 1");
    if (check_tail && eps_min < 8.0 / cutoff() * (1.0 - 1e-12))
      throw ValidationError("eps_min violates the tail condition eps_min >= 8/sqrt(lambda_max)");
  }

  KeyValueDoc to_doc() const {
    KeyValueDoc d;
    d.set("model", "model", model);
    d.set("model", "alpha", alpha);
    d.set("model", "rim_radius", format_double(rim_radius));
    d.set("model", "bc", bc);
    d.set("spectrum", "lambda_max", format_double(lambda_max));
    d.set("lengths", "horizon", format_double(horizon));
    d.set("trace", "tmax", format_double(tmax));
    d.set("trace", "dt", format_double(dt));
    d.set("trace", "eps_min", format_double(eps_min));
    d.set("trace", "eps_max", format_double(eps_max));
    d.set("trace", "eps_count", std::to_string(eps_count));
    d.set("trace", "window", format_double(window));
    d.set("trace", "threshold", format_double(threshold));
    d.set("trace", "match_tol", format_double(match_tol));
    d.set("trace", "t_min", format_double(t_min));
    d.set("io", "out", out);
    d.set("io", "cache_dir", cache_dir);
    d.set("run", "threads", std::to_string(threads));
    return d;
  }

  std::string to_text() const { return to_doc().to_text(); }

  /// Applies every key of `doc` on top of the current values.
  void apply(const KeyValueDoc& doc) {
    for (const auto& [section, entries] : doc.sections()) {
      for (const auto& [key, value] : entries) assign(section, key, value);
    }
  }

  static RunConfig parse(std::string_view text) {
    RunConfig c;
    c.apply(KeyValueDoc::parse(text));
    return c;
  }

 private:
  void assign(const std::string& section, const std::string& key, const std::string& value) {
    const std::string k = section + "." + key;
    auto num = [&](double& field) { field = io::parse_double(value); };
    if (k == "model.model") model = value;
    else if (k == "model.alpha") alpha = value;
    else if (k == "model.rim_radius") num(rim_radius);
    else if (k == "model.bc") bc = value;
    else if (k == "spectrum.lambda_max") num(lambda_max);
    else if (k == "lengths.horizon") num(horizon);
    else if (k == "trace.tmax") num(tmax);
    else if (k == "trace.dt") num(dt);
    else if (k == "trace.eps_min") num(eps_min);
    else if (k == "trace.eps_max") num(eps_max);
    else if (k == "trace.eps_count") eps_count = static_cast<int>(io::parse_int(value));
    else if (k == "trace.window") num(window);
    else if (k == "trace.threshold") num(threshold);
    else if (k == "trace.match_tol") num(match_tol);
    else if (k == "trace.t_min") num(t_min);
    else if (k == "io.out") out = value;
    else if (k == "io.cache_dir") cache_dir = value;
    else if (k == "run.threads") {
      const auto v = io::parse_int(value);
      if (v < 0) throw ValidationError("threads must be non-negative");
      threads = static_cast<unsigned>(v);
    } else {
      throw ValidationError("unknown config key '" + k + "'");
    }
  }
};

}  // namespace conicwave
