#pragma once

#include "periodrh/criteria.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace periodrh::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kCacheVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";
/// Only the cache location may come from the environment.
inline constexpr const char* kCacheEnv = "PERIODRH_CACHE_DIR";

enum ExitCode : int { ok = 0, io_error = 1, invalid = 2, numerical = 3, budget = 4 };

enum class OutputMode { json, csv, both };

struct RunConfig {
  /// Digits; 0 selects max(64, 2k) per weight.
  int precision = 0;
  double tolerance = zeros::kDefaultTolerance;
  std::filesystem::path cache_dir;
  bool use_cache = true;
  std::uint64_t seed = 0;
  std::uint64_t budget = 1'000'000;
  OutputMode output = OutputMode::json;
  /// Empty: write to the output stream.
  std::filesystem::path out_dir;
  bool content_addressed = false;
  int threads = 1;

  int precision_for(int k) const { return precision > 0 ? precision : default_precision(k); }
};

/// Throws InvalidArgument when precision < 32 (and nonzero), tolerance is
/// outside (0, 1e-4), budget < 1 or threads < 1.
void validate(const RunConfig& config);

/// Runs one subcommand; returns the process exit code.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// A serialized result: JSON body plus an optional CSV rendering.
struct Report {
  std::string command;
  /// File name stem, e.g. "scan-k12-X1".
  std::string stem;
  json result;
  std::optional<std::string> csv;
  /// Digits used; recorded in the metadata block.
  int precision = 0;
};

/// Full JSON document with metadata and digests. Timestamps are excluded from
/// content_sha256.
json document(const Report& report, const RunConfig& config, const std::optional<std::string>& csv_digest);
/// SHA-256 of the document with metadata.timestamp and the digests block removed.
std::string content_digest(const json& doc);
std::string sha256_hex(const std::string& data);

/// Writes the report per config.output (files under out_dir, or the stream).
/// Returns the paths written.
std::vector<std::filesystem::path> emit_report(const Report& report, const RunConfig& config, std::ostream& out);

/// Versioned cache of eigenform and critical-value tables under
/// <cache>/<k>/<precision>/.
std::filesystem::path cache_path(const std::filesystem::path& cache_dir, int k, int precision);
json tables_to_json(const criteria::EigenTables& tables);
criteria::EigenTables tables_from_json(const json& j);
/// Loads from the cache when enabled and present, otherwise builds (and stores).
criteria::EigenTables load_tables(int k, const RunConfig& config);

std::filesystem::path default_cache_dir();

}  // namespace periodrh::cli
