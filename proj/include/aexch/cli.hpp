#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aexch/engine.hpp"

namespace aexch::cli {

inline constexpr const char* tool_name = "aexch";
inline constexpr const char* tool_version = "0.1.0";

// Exit-code scheme: 0 ok, 2 config error, 3 I/O error, 4 phase guard.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_io = 3;
inline constexpr int exit_phase = 4;

/// Flat `key = value` config file; `#` starts a comment, blank lines ignored.
class Config {
public:
    static Config from_file(const std::filesystem::path& path);
    static Config from_text(std::string text);

    bool has(const std::string& key) const;
    const std::string& raw(const std::string& key) const; ///< throws ConfigError
    double real(const std::string& key) const;
    std::uint64_t uint(const std::string& key) const;
    double real_or(const std::string& key, double fallback) const;
    std::uint64_t uint_or(const std::string& key, std::uint64_t fallback) const;
    std::string str_or(const std::string& key, std::string fallback) const;

    /// Raw file bytes, for the content digest.
    const std::string& text() const { return text_; }
    const std::filesystem::path& base_dir() const { return base_dir_; }

private:
    std::string text_;
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_;
};

/// FNV-1a 64-bit content hash, 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest round-trip decimal form (byte-stable, '.' separator).
std::string format_double(double v);
std::string format_double(double v, int precision);

struct Manifest {
    std::string subcommand;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;
};

/// Writes manifest.json into the directory (exactly one per output dir).
void write_manifest(const std::filesystem::path& dir, const Manifest& manifest);

/// Simulation config from a parsed file. Required keys: dist, agents, sweeps.
SimConfig sim_config_from(const Config& config);

/// CSV with a header row, '\n' endings, '.' decimals.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view header);
    void row(std::initializer_list<double> values);
    void raw_row(std::string_view line);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

int cmd_simulate(const std::filesystem::path& config_path,
                 const std::filesystem::path& out_dir, std::size_t replicas,
                 std::size_t jobs, std::ostream& out, std::ostream& diag);
int cmd_solve_exponent(const std::string& dist_spec, bool require_stable,
                       std::ostream& out, std::ostream& diag);
int cmd_interface(const std::filesystem::path& out_dir, std::ostream& diag);
int cmd_kinetic(const std::string& dist_spec, const std::filesystem::path& out_dir,
                std::size_t nodes, std::size_t max_iters, double tol,
                std::ostream& diag);
int cmd_reversibility(const std::string& dist_spec,
                      const std::filesystem::path& out_dir, std::ostream& out,
                      std::ostream& diag);
int cmd_rank_profile(const std::filesystem::path& snapshot_path,
                     const std::string& dist_spec,
                     const std::filesystem::path& out_dir, std::ostream& diag);
int cmd_analyze(const std::filesystem::path& snapshot_path,
                const std::filesystem::path& out_dir, std::size_t bins,
                std::optional<double> gamma_T, std::ostream& diag);
int cmd_figure(const std::string& name, const std::filesystem::path& out_dir,
               std::ostream& diag);

std::vector<std::string> figure_names();

} // namespace aexch::cli
