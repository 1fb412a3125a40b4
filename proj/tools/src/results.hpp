#pragma once

// Results persistence: CSV + JSON-lines tables, plot data, manifests.
//
// Layout under the results root ($QMRLAB_RESULTS, default ./results):
//   manifests.jsonl             one line per committed run, append-only
//   <name>-<hash>[-N]/          one directory per run
//     manifest.json
//     results.csv, results.jsonl
//     verdicts.csv, verdicts.jsonl   (scaling runs)
//     fit.json                       (kernel runs)
//     plot/*.dat
// A run directory is staged under a temporary name and renamed into place.

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmr/kernel.hpp"
#include "qmr/scaling.hpp"

namespace qmr::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& data);
std::string utc_timestamp();
const char* artifact_version();

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const fs::path& path, const std::string& content);
/// Appends one line with a single write() on an O_APPEND descriptor.
void append_line(const fs::path& path, const std::string& line);

/// --out wins, then $QMRLAB_RESULTS, then ./results.
fs::path results_root(const std::string& override_dir);

struct Manifest {
    std::string kind;  // "scaling" or "kernel"
    std::string name;
    std::string directory;
    std::string config_file;
    std::string config_sha256;
    std::string spec_hash;
    std::string timestamp;
    std::string version;
    std::string command;
    std::vector<std::pair<std::string, double>> timings;
    std::vector<std::string> files;
    std::string status;  // pass / fail
    int n = 0, k = 0;
    std::string config_text;

    ojson to_json() const;
    static Manifest from_json(const ojson& j);
};

/// Files staged in memory and committed as one directory.
class ResultSet {
public:
    void add(const std::string& relpath, std::string content);
    const std::map<std::string, std::string>& files() const { return files_; }

    /// Creates root/<stem> (or root/<stem>-2, ...), fills manifest.files,
    /// writes everything plus manifest.json and appends to manifests.jsonl.
    fs::path commit(const fs::path& root, const std::string& stem, Manifest& manifest) const;

private:
    std::map<std::string, std::string> files_;
};

// Scaling tables.
std::string scaling_csv(const scaling::ExperimentTable& table);
std::string scaling_jsonl(const scaling::ExperimentTable& table);
std::vector<scaling::TableRow> parse_scaling_csv(const std::string& text);

struct VerdictRecord {
    ExtRational p{2};
    theory::DeltaResult theory;
    scaling::ScalingFit fit;
    scaling::Verdict verdict;
};
std::string verdicts_csv(const std::vector<VerdictRecord>& v);
std::string verdicts_jsonl(const std::vector<VerdictRecord>& v);

/// "inf", "4", "5_2" for p = 5/2.
std::string exponent_tag(const ExtRational& p);

/// relpath -> content of every plot file derived from a scaling table.
std::map<std::string, std::string> scaling_plots(const std::vector<scaling::TableRow>& rows, int n, int k);

// Kernel tables.
std::string kernel_csv(const kernel::KernelEstimate& est);
std::string kernel_jsonl(const kernel::KernelEstimate& est);
std::vector<kernel::KernelRow> parse_kernel_csv(const std::string& text);
std::map<std::string, std::string> kernel_plots(const std::vector<kernel::KernelRow>& rows);

/// Plot files regenerated from a run directory's tables and manifest.
std::map<std::string, std::string> render_plots(const fs::path& dir, const Manifest& manifest);

std::string read_file(const fs::path& path);

}  // namespace qmr::cli
