#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

namespace scer::tools {

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read output '" + path + "' for hashing");
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Run record written next to the primary output as <output>.manifest.json.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv) : started_(utc_now()) {
    doc_["tool"] = "scer_lab";
    doc_["version"] = SCER_VERSION;
    doc_["command"] = std::move(command);
    doc_["arguments"] = std::move(argv);
  }

  nlohmann::json& operator[](const char* key) { return doc_[key]; }

  void add_output(const std::string& path) { outputs_.push_back(path); }

  void write(const std::string& primary_output) {
    doc_["started_utc"] = started_;
    doc_["finished_utc"] = utc_now();
    auto& outs = doc_["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs_) outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    const auto path = primary_output + ".manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
    out << doc_.dump(2) << "\n";
  }

 private:
  std::string started_;
  nlohmann::json doc_;
  std::vector<std::string> outputs_;
};

}  // namespace scer::tools
