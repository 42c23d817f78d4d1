#pragma once

// Binary instance files:
//   "MAPC" | u16 version=1 | u16 D | u32 N | u64 seed | N^D x i64 | u64 checksum
// all little-endian; checksum is the sum of the coefficients mod 2^64.
// A JSON sidecar with the same stem carries the generating InstanceSpec.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"

namespace mapland {

inline constexpr std::uint16_t kInstanceFormatVersion = 1;
inline constexpr std::size_t kInstanceHeaderBytes = 4 + 2 + 2 + 4 + 8;
inline constexpr const char* kGeneratorName = "uniform-int/mt19937_64";

namespace detail {

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  auto u = static_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<unsigned char>((u >> (8 * b)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
  std::make_unsigned_t<T> u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<std::make_unsigned_t<T>>(p[b]) << (8 * b);
  return static_cast<T>(u);
}

}  // namespace detail

// Sum of the coefficients mod 2^64.
inline std::uint64_t instance_checksum(std::span<const Cost> costs) {
  std::uint64_t sum = 0;
  for (Cost c : costs) sum += static_cast<std::uint64_t>(c);
  return sum;
}

inline std::vector<unsigned char> serialize_instance(const CostArray& c, std::uint64_t seed = 0) {
  std::vector<unsigned char> out;
  out.reserve(kInstanceHeaderBytes + 8 * c.costs().size() + 8);
  for (char ch : {'M', 'A', 'P', 'C'}) out.push_back(static_cast<unsigned char>(ch));
  detail::put_le<std::uint16_t>(out, kInstanceFormatVersion);
  detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(c.dims()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.card()));
  detail::put_le<std::uint64_t>(out, seed);
  for (Cost v : c.costs()) detail::put_le<std::int64_t>(out, v);
  detail::put_le<std::uint64_t>(out, instance_checksum(c.costs()));
  return out;
}

struct ParsedInstance {
  CostArray costs;
  std::uint64_t seed;
};

inline ParsedInstance parse_instance(std::span<const unsigned char> bytes) {
  if (bytes.size() < kInstanceHeaderBytes) throw FormatError("instance header truncated");
  if (std::memcmp(bytes.data(), "MAPC", 4) != 0) throw FormatError("bad magic, expected MAPC");
  const auto* p = bytes.data();
  const auto version = detail::get_le<std::uint16_t>(p + 4);
  if (version != kInstanceFormatVersion) throw FormatError("unsupported instance version " + std::to_string(version));
  const int dims = detail::get_le<std::uint16_t>(p + 6);
  const auto card = detail::get_le<std::uint32_t>(p + 8);
  const auto seed = detail::get_le<std::uint64_t>(p + 12);
  if (dims < 3) throw FormatError("header declares D=" + std::to_string(dims) + ", need D >= 3");
  if (card < 2 || card > static_cast<std::uint32_t>(INT32_MAX))
    throw FormatError("header declares invalid N=" + std::to_string(card));
  std::uint64_t count = 0;
  try {
    count = CostArray::element_count(dims, static_cast<int>(card));
  } catch (const RangeError&) {
    throw FormatError("header N^D overflows");
  }
  const std::uint64_t payload = bytes.size() - kInstanceHeaderBytes;
  if (count > (UINT64_MAX - 8) / 8 || payload < 8 * count + 8)
    throw FormatError("truncated payload: header declares N^D = " + std::to_string(count) + " coefficients, file holds " +
                      std::to_string(payload >= 8 ? (payload - 8) / 8 : 0));
  if (payload > 8 * count + 8) throw FormatError("trailing bytes after checksum");
  std::vector<Cost> costs(count);
  const auto* q = p + kInstanceHeaderBytes;
  for (std::uint64_t k = 0; k < count; ++k) costs[k] = detail::get_le<std::int64_t>(q + 8 * k);
  const auto stored = detail::get_le<std::uint64_t>(q + 8 * count);
  if (stored != instance_checksum(costs)) throw FormatError("checksum mismatch");
  return {CostArray(dims, static_cast<int>(card), std::move(costs)), seed};
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto side = path;
  side.replace_extension(".json");
  return side;
}

inline nlohmann::json instance_metadata(const CostArray& c, const std::optional<InstanceSpec>& spec) {
  nlohmann::json j;
  j["format_version"] = kInstanceFormatVersion;
  j["D"] = c.dims();
  j["N"] = c.card();
  if (spec) {
    j["seed"] = spec->seed;
    j["low"] = spec->low;
    j["high"] = spec->high;
    // Stand-in distribution; the reference generator is not public.
    j["generator"] = kGeneratorName;
  } else {
    j["seed"] = 0;
    j["generator"] = "external";
  }
  return j;
}

inline void write_instance(const CostArray& c, const std::filesystem::path& path,
                           const std::optional<InstanceSpec>& spec = std::nullopt) {
  if (spec && (spec->dims != c.dims() || spec->card != c.card())) throw ShapeError("spec shape does not match array");
  const auto bytes = serialize_instance(c, spec ? spec->seed : 0);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw IoError("cannot open sidecar for " + path.string());
  side << instance_metadata(c, spec).dump(2) << '\n';
}

inline ParsedInstance read_instance_with_seed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_instance(bytes);
}

inline CostArray read_instance(const std::filesystem::path& path) { return read_instance_with_seed(path).costs; }

// The generating spec, when the sidecar exists and describes a generated
// instance.
inline std::optional<InstanceSpec> read_instance_spec(const std::filesystem::path& path) {
  std::ifstream in(sidecar_path(path));
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad sidecar JSON: " + std::string(e.what()));
  }
  if (!j.contains("low")) return std::nullopt;
  InstanceSpec s;
  s.dims = j.at("D").get<int>();
  s.card = j.at("N").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.low = j.at("low").get<Cost>();
  s.high = j.at("high").get<Cost>();
  return s;
}

}  // namespace mapland
