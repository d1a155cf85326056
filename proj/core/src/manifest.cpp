#include "terracelab/manifest.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>

#include "terracelab/common.hpp"
#include "terracelab/io.hpp"

namespace terracelab {

using json = nlohmann::json;

void RunManifest::record_file(const std::filesystem::path& dir,
                              const std::string& rel) {
  FileEntry e;
  e.path = rel;
  e.bytes = std::filesystem::file_size(dir / rel);
  files.push_back(std::move(e));
}

std::string RunManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["code_version"] = code_version;
  j["created_at"] = created_at;
  j["files"] = json::array();
  for (const auto& f : files)
    j["files"].push_back({{"path", f.path}, {"bytes", f.bytes}});
  j["checks"] = json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"outcome", c.outcome},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.config_hash = j.value("config_hash", "");
  m.code_version = j.value("code_version", "");
  m.created_at = j.value("created_at", "");
  for (const auto& f : j.at("files"))
    m.files.push_back({f.at("path").get<std::string>(),
                       f.at("bytes").get<uint64_t>()});
  if (j.contains("checks")) {
    for (const auto& c : j.at("checks")) {
      CheckResult r;
      r.name = c.at("name").get<std::string>();
      r.outcome = c.at("outcome").get<std::string>();
      r.value = c.value("value", 0.0);
      r.threshold = c.value("threshold", 0.0);
      r.detail = c.value("detail", "");
      m.checks.push_back(std::move(r));
    }
  }
  return m;
}

RunManifest make_manifest(const std::string& config_hash) {
  RunManifest m;
  m.config_hash = config_hash;
  m.code_version = kVersion;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  m.created_at = buf;
  return m;
}

void write_manifest(RunManifest& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "manifest.json", m.to_json());
}

ManifestVerification verify_manifest(const std::filesystem::path& dir) {
  ManifestVerification v;
  const RunManifest m =
      RunManifest::from_json(read_text_file(dir / "manifest.json"));
  for (const auto& f : m.files) {
    const auto path = dir / f.path;
    if (!std::filesystem::exists(path)) {
      v.ok = false;
      v.missing.push_back(f.path);
    } else if (std::filesystem::file_size(path) != f.bytes) {
      v.ok = false;
      v.size_mismatch.push_back(f.path);
    }
  }
  return v;
}

}  // namespace terracelab
