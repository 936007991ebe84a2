#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recur2d/error.hpp"
#include "recur2d/systems.hpp"

namespace recur2d {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Experiment kinds understood by run_experiment (also the CLI subcommands).
const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string kind;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    Json system;      // builtin name or explicit description; may be null
    Json params = Json::object();
    Json tolerances = Json::object();

    Json to_json() const;
};

/// Validates the top-level layout (strict keys). Per-kind parameters are
/// checked when the experiment reads them. Throws ConfigInvalid.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

/// Builds the system described by a config node: a builtin name ("lazy5") or
/// {"builtin": name} or {"symbols", "transition", "potential", "observable"}.
/// `path` prefixes error messages.
System resolve_system(const Json& node, const std::string& path = "$.system");

/// Window given as letter names; two-sided windows need odd length.
Window parse_window(const SftSpec& sft, const Json& node, bool two_sided, const std::string& path);

/// FNV-1a 64-bit hash, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Strict reader for one JSON object: every key must be consumed before
/// finish(), which reports leftovers by JSON path.
class ParamReader {
public:
    ParamReader(const Json& node, std::string path);

    bool has(const std::string& key) const;
    const Json& raw(const std::string& key);
    std::string child_path(const std::string& key) const { return path_ + "." + key; }
    ParamReader child(const std::string& key);

    double number(const std::string& key, std::optional<double> fallback = std::nullopt);
    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt);
    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt);
    bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt);
    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt);
    std::vector<int> integers(const std::string& key, std::optional<std::vector<int>> fallback = std::nullopt);

    void finish() const;
    const std::string& path() const noexcept { return path_; }

private:
    const Json* find(const std::string& key);
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    const Json* node_;
    std::string path_;
    std::set<std::string> used_;
};

}  // namespace recur2d
