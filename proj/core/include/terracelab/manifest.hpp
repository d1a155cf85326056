#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace terracelab {

struct CheckResult {
  std::string name;
  std::string outcome;  // "pass" | "fail" | "hypotheses-unmet"
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;

  bool failed() const { return outcome == "fail"; }
};

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::string created_at;  // ISO-8601
  struct FileEntry {
    std::string path;  // relative to the manifest directory
    uint64_t bytes = 0;
  };
  std::vector<FileEntry> files;
  std::vector<CheckResult> checks;

  void record_file(const std::filesystem::path& dir, const std::string& rel);
  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

RunManifest make_manifest(const std::string& config_hash);

/// Writes manifest.json into dir (and records itself last).
void write_manifest(RunManifest& m, const std::filesystem::path& dir);

struct ManifestVerification {
  bool ok = true;
  std::vector<std::string> missing;
  std::vector<std::string> size_mismatch;
};

/// Re-checks that every file listed in dir/manifest.json exists with the
/// recorded size.
ManifestVerification verify_manifest(const std::filesystem::path& dir);

}  // namespace terracelab
