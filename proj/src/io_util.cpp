#include "spherelab/io_util.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spherelab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void manifest_add_output(RunManifest& manifest, const std::string& path,
                         const std::string& contents) {
  manifest.outputs.push_back({path, contents.size(), digest_hex(contents)});
}

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["tool"] = "spherelab";
  j["version"] = manifest.version;
  j["command_line"] = manifest.command_line;
  j["config"] = manifest.config;
  if (manifest.seed)
    j["seed"] = *manifest.seed;
  else
    j["seed"] = nullptr;
  j["wall_time_seconds"] = manifest.wall_time_seconds;
  auto outputs = nlohmann::ordered_json::array();
  for (const auto& o : manifest.outputs) {
    outputs.push_back(nlohmann::ordered_json{
        {"path", o.path}, {"bytes", o.bytes}, {"digest", o.digest}});
  }
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

void write_file_with_manifest(const std::string& path, const std::string& contents,
                              RunManifest manifest) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
  }
  manifest_add_output(manifest, path, contents);
  const std::string sidecar = path + ".manifest.json";
  std::ofstream out(sidecar, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open manifest file: " + sidecar);
  out << manifest_to_json(manifest);
}

namespace {

[[noreturn]] void grammar_error(const std::string& text) {
  throw std::invalid_argument(
      "cannot parse product spec '" + text +
      "'; expected factors S<d> or S<d>^<n> joined by 'x', e.g. S1^2xS2");
}

}  // namespace

std::vector<SphereFactor> parse_product_factors(const std::string& text) {
  std::vector<SphereFactor> factors;
  size_t pos = 0;
  const auto read_int = [&]() -> int {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start || pos - start > 9) grammar_error(text);
    return std::stoi(text.substr(start, pos - start));
  };
  while (pos < text.size()) {
    if (std::tolower(static_cast<unsigned char>(text[pos])) != 's') grammar_error(text);
    ++pos;
    const int d = read_int();
    if (d < 1) grammar_error(text);
    int n = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      n = read_int();
      if (n < 1) grammar_error(text);
    }
    factors.push_back({SphereDim(d), n});
    if (pos < text.size()) {
      if (std::tolower(static_cast<unsigned char>(text[pos])) != 'x')
        grammar_error(text);
      ++pos;
      if (pos == text.size()) grammar_error(text);
    }
  }
  if (factors.empty()) grammar_error(text);
  return factors;
}

std::string format_factors(const std::vector<SphereFactor>& factors) {
  std::ostringstream os;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) os << " x ";
    os << "S" << factors[i].d.dim();
    if (factors[i].count > 1) os << "^" << factors[i].count;
  }
  return os.str();
}

}  // namespace spherelab
