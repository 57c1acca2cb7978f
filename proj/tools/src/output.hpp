#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mallows/report.hpp"

namespace mallows::cli {

struct OutputFile {
  std::string name;
  std::string content;
};

std::string sha256_hex(std::string_view data);

// Writes to a sibling temporary and renames it into place.
void write_atomically(const std::filesystem::path& path, std::string_view content);

struct ManifestInfo {
  Json config;
  std::string version;
  std::string started_at;  // UTC, ISO 8601
  double wall_seconds = 0;
  int exit_code = 0;
};

// Writes every output, then manifest.json last.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files,
                   const ManifestInfo& info);

}  // namespace mallows::cli
