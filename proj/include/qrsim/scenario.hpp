#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qrsim/rng.hpp"

namespace qrsim {

enum class ScenarioKind { Purify, Filter, Tomography, Trapdoor, Schur };

std::string to_string(ScenarioKind kind);

// Declarative description of one experiment, parsed from a flat key = value
// document with a single [parameters] block.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Purify;
    std::string master_seed_hex;  // 16 hex chars (64-bit master seed)
    std::string output_path;
    std::map<std::string, std::string> parameters;

    std::uint64_t master_seed() const;
};

struct ParseResult {
    std::vector<std::string> errors;  // empty on success; all problems, not just the first
    ScenarioConfig config;            // valid only when errors is empty
    bool ok() const { return errors.empty(); }
};

ParseResult parse_scenario(const std::string& text);

// Tabular experiment output plus the information needed to reproduce it.
struct RunResult {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> substream_labels;
};

// Dispatch to the matching protocol module. Deterministic under the master
// seed. Throws ExperimentFailure on module-level assertion failures.
RunResult run_scenario(const ScenarioConfig& config);

// Header + data rows, floats at 17 significant digits, newline terminated.
void emit_csv(const RunResult& result, const std::string& path);

// Reproduction manifest written alongside the CSV (JSON).
void emit_manifest(const ScenarioConfig& config, const RunResult& result,
                   double wall_seconds, const std::string& csv_path);

// Decimal formatting used for every CSV float cell.
std::string format_double(double v);

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kDefaultSeedHex = "6a1f52c803b94d7e";

}  // namespace qrsim
