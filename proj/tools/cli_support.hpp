#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mapland/mapland.hpp"

namespace mapland::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kIo = 3,
  kCap = 4,
  kVerification = 5,
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string command;
  int dims = 4;
  int card = 5;
  std::size_t count = 1;
  std::uint64_t seed = 1;
  Cost low = 0;
  Cost high = 100000;
  std::vector<std::string> algos;
  std::string starts = "random";
  std::string starts_file;
  std::size_t mu = 1;
  int jobs = 1;
  std::size_t node_cap = 5'000'000;
  std::string out;
  std::string instance;
  std::string batch;
  std::string graph;
  std::string dims_range = "3..10";
  std::uint64_t max_bytes = 4ull << 30;
  bool no_landscape = false;
  bool check_optimum = false;
  bool export_landscape = false;
  bool timing = false;
  std::string manifest;
};

// Shortest round-trip text for a double; NaN and infinities print empty.
inline std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

template <class T>
std::string fmt_opt(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw ValueError("csv row has wrong arity");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) text_ += ',';
      text_ += csv_field(cells[k]);
    }
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  auto [ptr, ec] = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, ptr);
  return std::string(16 - s.size(), '0') + s;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Records every file written under the output directory for the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory " + root_.string() + ": " + ec.message());
  }

  const std::filesystem::path& root() const { return root_; }

  void write(const std::string& name, const std::string& bytes) {
    const auto path = root_ / name;
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + path.string());
      out << bytes;
      out.close();
      if (!out) throw IoError("write failed: " + path.string());
    }
    record(name);
  }

  // For files produced by library writers.
  void record(const std::string& name) {
    const auto bytes = read_file(root_ / name);
    files_.push_back({{"path", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a(bytes))}});
  }

  const nlohmann::json& files() const { return files_; }

 private:
  std::filesystem::path root_;
  nlohmann::json files_ = nlohmann::json::array();
};

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Estimated bytes for an N^D coefficient array; refuses past the budget.
inline void check_memory(int dims, int card, std::uint64_t max_bytes) {
  CostArray::validate_shape(dims, card);
  std::uint64_t count = 0;
  try {
    count = CostArray::element_count(dims, card);
  } catch (const RangeError&) {
    throw CapExceededError("refusing D=" + std::to_string(dims) + " N=" + std::to_string(card) +
                           ": N^D overflows 64 bits");
  }
  const long double bytes = 8.0L * static_cast<long double>(count);
  if (bytes > static_cast<long double>(max_bytes)) {
    std::ostringstream msg;
    msg << "refusing D=" << dims << " N=" << card << ": cost array needs about " << std::scientific
        << static_cast<double>(bytes) << " bytes (8*N^D), budget is " << max_bytes << " (--max-bytes)";
    throw CapExceededError(msg.str());
  }
}

}  // namespace mapland::cli
