#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "recur2d/config.hpp"

namespace recur2d {

struct Artifact {
    std::string name;     // file name inside the output directory
    std::string content;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;   // one-line human summary
    Json metrics = Json::object();
};

struct RunResult {
    std::string kind;
    Json summary = Json::object();
    std::vector<Artifact> artifacts;
    std::vector<CriterionResult> criteria;
    Json manifest = Json::object();

    bool passed() const;
};

struct RunOptions {
    /// Acceptance criteria to run; empty means all.
    std::vector<int> only;
    /// Progress lines; may be null.
    std::ostream* log = nullptr;
};

/// Runs one experiment and builds its manifest. Throws ConfigInvalid for bad
/// parameters, other library errors as they arise.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes artifacts, summary.json and manifest.json into `dir` (created if needed).
void write_outputs(const RunResult& result, const std::string& dir);

/// Built-in configuration for a kind; "accept" gives the shipped acceptance suite.
Json default_config(const std::string& kind);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

/// Builds CSV text with a fixed header.
class CsvText {
public:
    explicit CsvText(const std::vector<std::string>& header);
    CsvText& cell(double v);
    CsvText& cell(std::int64_t v);
    CsvText& cell(const std::string& v);
    void end_row();
    const std::string& str() const noexcept { return text_; }

private:
    std::string text_;
    bool first_ = true;
};

}  // namespace recur2d
