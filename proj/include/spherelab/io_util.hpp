// Text output helpers shared by the CLI: stable float formatting, file
// digests, run manifests, and the product-space spec grammar.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spherelab/product_spheres.hpp"

namespace spherelab {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest text that round-trips a double exactly (17 significant digits).
std::string format_double(double v);

// Empty string for an absent value; CSV cells for optional columns.
std::string format_optional(const std::optional<double>& v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

struct OutputFileRecord {
  std::string path;
  std::uint64_t bytes = 0;
  std::string digest;
};

struct RunManifest {
  std::string command_line;
  std::map<std::string, std::string> config;
  std::optional<std::uint64_t> seed;
  std::string version = kToolVersion;
  double wall_time_seconds = 0.0;
  std::vector<OutputFileRecord> outputs;
};

// Records `contents` written at `path` into the manifest.
void manifest_add_output(RunManifest& manifest, const std::string& path,
                         const std::string& contents);

// JSON rendering of the manifest (keys in fixed order).
std::string manifest_to_json(const RunManifest& manifest);

// Writes `contents` to `path` and a manifest sidecar to `path + ".manifest.json"`.
void write_file_with_manifest(const std::string& path, const std::string& contents,
                              RunManifest manifest);

// Factors per the grammar `S<d>[^<n>]` joined by `x`, case-insensitive,
// e.g. "S1^2xS2". Throws std::invalid_argument with the grammar on failure.
std::vector<SphereFactor> parse_product_factors(const std::string& text);

// Canonical text for a factor list, e.g. "S1^2 x S2".
std::string format_factors(const std::vector<SphereFactor>& factors);

}  // namespace spherelab
