#include "output.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace mallows::cli {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files,
                   const ManifestInfo& info) {
  std::filesystem::create_directories(dir);
  Json outputs = Json::array();
  for (const auto& f : files) {
    write_atomically(dir / f.name, f.content);
    outputs.push_back(Json{{"file", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
  }
  Json manifest;
  manifest["tool"] = "mallows-lab";
  manifest["version"] = info.version;
  manifest["config"] = info.config;
  manifest["started_at"] = info.started_at;
  manifest["wall_time_seconds"] = info.wall_seconds;
  manifest["exit_code"] = info.exit_code;
  manifest["outputs"] = outputs;
  write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace mallows::cli
