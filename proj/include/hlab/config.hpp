#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hlab/henon.hpp"

namespace hlab {

/// Flat key-value text file with optional [section] headers; keys are
/// stored as "section.key" ("" section for the preamble). Lines are
/// `key = value`, '#' starts a comment. Parse errors carry line numbers.
class KeyValueFile {
  public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_text(const std::string& text,
                                   const std::string& origin = "<text>");

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& dflt) const;
    double get_num(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;
    const std::map<std::string, std::string>& items() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
    std::string origin_;
};

/// Map definition file: poly coefficients as re/im pairs (ascending),
/// twist re/im, bidisk radii and fractions.
HenonLikeMap load_map(const std::string& path);
/// f(z,w) = (z^2 - 2 + 0.1 w, z) on Bidisk(3,3,0.8,0.8,0.9).
HenonLikeMap standard_map();

/// Run-wide settings shared by every subcommand; flags override the
/// config file, which overrides these defaults.
struct ExperimentConfig {
    std::string map_file;      // empty = standard map
    int resolution = 48;
    std::uint64_t seed = 42;
    std::string route = "points";
    double tolerance = 1e-3;
    std::string out_dir = ".";
    int threads = 1;

    void validate() const;
    static ExperimentConfig from_file(const std::string& path);
    void apply(const KeyValueFile& kv);
    std::map<std::string, std::string> snapshot() const;
};

/// Scalar formatted with 17 significant digits (round-trip exact).
std::string format_scalar(double v);

/// Per-run provenance artifact: config snapshot, version, wall clock,
/// output-file checksums, and named scalar checks with pass flags.
class RunManifest {
  public:
    RunManifest(std::string command, const ExperimentConfig& cfg);

    /// Records the file and its FNV-1a content checksum.
    void add_output(const std::string& path);
    void add_check(const std::string& name, double value, bool pass);
    void add_note(const std::string& key, const std::string& value);
    void set_wall_seconds(double s) { wall_seconds_ = s; }
    bool all_pass() const;

    void write(const std::string& path) const;

    struct Check {
        std::string name;
        double value;
        bool pass;
    };
    struct Output {
        std::string path;
        std::uint64_t checksum;
    };

  private:
    std::string command_;
    std::map<std::string, std::string> config_;
    std::vector<Output> outputs_;
    std::vector<Check> checks_;
    std::map<std::string, std::string> notes_;
    double wall_seconds_ = 0.0;
};

std::uint64_t file_checksum(const std::string& path);

/// One row of the aggregated acceptance table.
struct ReportRow {
    std::string run;        // manifest stem
    std::string check;      // check name or "checksum:<file>"
    std::string value;      // 17-digit scalar or checksum
    std::string status;     // pass | fail | incomplete | mismatch | missing
};

/// Scans a run directory for *-manifest.json files, re-verifies output
/// checksums, and aggregates all checks. Partial or unreadable runs are
/// kept as incomplete rows, never dropped.
std::vector<ReportRow> aggregate_report(const std::string& dir);
void write_report_csv(const std::string& path,
                      const std::vector<ReportRow>& rows);

}  // namespace hlab
