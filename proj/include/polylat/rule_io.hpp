#pragma once

// File formats: rule files (JSON), weight specifications, point exports and
// convergence-study CSV.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "polylat/points.hpp"
#include "polylat/qmc.hpp"

namespace polylat {

inline constexpr int kRuleFileVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct Provenance {
  std::string tool_version = kToolVersion;
  std::string construction = "cbc_fast";  ///< "cbc_fast" or "cbc_slow"
  std::string tie_break = "min_encoding";
  /// Empty by default so repeated constructions produce identical files.
  std::string timestamp;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct RuleFile {
  RuleSpec rule;
  Provenance provenance;
};

/// Weights as {"type": "product", "params": [g1, ..]} or
/// {"type": "general", "params": [{"u": [1, 3], "gamma": 0.5}, ..]}
/// (coordinates 1-indexed).
nlohmann::json weights_to_json(const WeightModel& w);
WeightModel weights_from_json(const nlohmann::json& j, int s);

/// Parses a weight specification for dimension s:
///   prod:c          gamma_j = c
///   prod:c^j        gamma_j = c^j
///   prod:c*j^-k     gamma_j = c j^{-k}
///   prod:a,b,..     explicit list of s values (brackets optional)
///   general:@file   JSON file holding the "general" form above, or its
///                   params array; relative paths resolve against `base_dir`
WeightModel parse_weight_spec(std::string_view spec, int s, const std::filesystem::path& base_dir = {});

nlohmann::json rule_to_json(const RuleFile& f);
/// Validates the rule (irreducible modulus, generator degrees, dimensions).
RuleFile rule_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with a trailing newline; deterministic.
std::string write_rule(const RuleFile& f);
RuleFile read_rule(std::string_view text);
void save_rule_file(const std::filesystem::path& path, const RuleFile& f);
RuleFile load_rule_file(const std::filesystem::path& path);

/// One line per point, coordinates as decimals with 17 significant digits.
void write_points_csv(std::ostream& out, const PointSet& points);

/// Binary point export, little-endian:
///   8 bytes  "PLATPTS1"
///   u32 s, u32 m, u32 m', u32 precision
///   u64 point count
///   count * s u64 numerators, row-major (value = numerator / 2^precision)
void write_points_binary(std::ostream& out, const PointSet& points, int m, int mprime);

struct BinaryPoints {
  int s = 0;
  int m = 0;
  int mprime = 0;
  PointSet points;
};
BinaryPoints read_points_binary(std::istream& in);

/// Columns m,N,mprime,B,mse_mean,mse_stderr,rms_err followed by the fitted
/// slopes (repeated on every row): slope_B_full, slope_B_half,
/// slope_rms_full, slope_rms_half, slope_mse_full, slope_mse_half.
void write_study_csv(std::ostream& out, const ErrorStudy& study);

}  // namespace polylat
