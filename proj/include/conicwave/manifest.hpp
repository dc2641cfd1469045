#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "conicwave/config.hpp"
#include "conicwave/io.hpp"

namespace conicwave {

inline std::filesystem::path manifest_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest";
  return p;
}

/// Writes `content` to `output` and a sibling manifest holding the command,
/// model key, content checksum, extra fields and the full config echo.
inline void write_with_manifest(const std::filesystem::path& output, const std::string& content,
                                const std::string& command, const std::string& model_key,
                                const std::vector<std::pair<std::string, std::string>>& extra,
                                const RunConfig& config) {
  io::write_atomic(output, content);
  KeyValueDoc doc;
  doc.set("manifest", "command", command);
  doc.set("manifest", "model_key", model_key);
  doc.set("manifest", "output", output.filename().string());
  doc.set("manifest", "checksum", io::checksum_text(content));
  for (const auto& [k, v] : extra) doc.set("manifest", k, v);
  // config echo under prefixed section names so it never collides
  KeyValueDoc echo;
  const KeyValueDoc cfg = config.to_doc();
  for (const auto& [section, entries] : cfg.sections())
    for (const auto& [k, v] : entries) echo.set("config." + section, k, v);
  const std::string text = doc.to_text() + "\n" + echo.to_text();
  io::write_atomic(manifest_path(output), text);
}

/// Reads the manifest next to `output` and checks the recorded checksum.
inline KeyValueDoc read_manifest(const std::filesystem::path& output) {
  const auto mp = manifest_path(output);
  if (!std::filesystem::exists(mp)) throw ValidationError("missing manifest '" + mp.string() + "'");
  KeyValueDoc doc = KeyValueDoc::parse(io::read_file(mp));
  const std::string* sum = doc.get("manifest", "checksum");
  if (!sum) throw ValidationError("manifest '" + mp.string() + "' has no checksum");
  if (*sum != io::checksum_text(io::read_file(output)))
    throw ValidationError("checksum mismatch for '" + output.string() + "'");
  return doc;
}

inline std::string manifest_field(const KeyValueDoc& doc, const std::string& key, const std::string& where) {
  const std::string* v = doc.get("manifest", key);
  if (!v) throw ValidationError("manifest for '" + where + "' lacks '" + key + "'");
  return *v;
}

}  // namespace conicwave
