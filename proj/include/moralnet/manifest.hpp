#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "moralnet/csv.hpp"
#include "moralnet/error.hpp"

namespace moralnet {

inline constexpr const char* kVersion = "0.1.0";

// 64-bit FNV-1a over the file's bytes, as 16 hex digits.
inline std::string content_hash(const std::string& path) {
  auto in = csv::open_input(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// Everything that determines a run's outputs. Two runs with equal manifests
// write byte-identical files.
struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();

  void add_input(const std::string& role, const std::string& path) {
    if (path.empty()) return;
    inputs.push_back({{"role", role}, {"path", path}, {"fnv1a64", content_hash(path)}});
  }

  nlohmann::ordered_json to_json() const {
    return {{"tool", "moralnet"}, {"version", kVersion}, {"subcommand", subcommand},
            {"seed", seed},       {"config", config},    {"inputs", inputs}};
  }

  void write(const std::string& path) const {
    auto out = csv::open_output(path);
    out << to_json().dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
  }
};

inline void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  auto out = csv::open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace moralnet
