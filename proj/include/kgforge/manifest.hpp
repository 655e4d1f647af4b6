// Run manifests. Every CLI command finishes by writing manifest.json next to
// its outputs: tool version, the effective configuration, and SHA-256 digests
// of every input read and output written. Two runs over the same inputs with
// the same configuration must produce identical digest sections; the
// generated_at timestamp is informational and never participates in any
// digest, so it is the only field allowed to differ between identical runs.
#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "kgforge/errors.hpp"

namespace kgforge::manifest {

inline constexpr const char* kToolName = "kgforge";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_stream(std::istream& in) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("cannot allocate digest context");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("cannot initialize sha256");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw Error("sha256 update failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 finalize failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for digest: " + path);
  return sha256_stream(in);
}

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

struct Manifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256

  void add_input(const std::string& path) { inputs[path] = sha256_file(path); }
  void add_output(const std::string& path) { outputs[path] = sha256_file(path); }

  nlohmann::json to_json() const {
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = command;
    doc["generated_at"] = utc_timestamp();
    doc["config"] = config;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    return doc;
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << to_json().dump(2) << '\n';
    if (!out) throw SinkWriteError("manifest " + path);
  }
};

}  // namespace kgforge::manifest
