#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "aexch/cli.hpp"
#include "aexch/errors.hpp"

#include "json.hpp"

namespace aexch::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    Config cfg = from_text(buffer.str());
    cfg.base_dir_ = path.parent_path();
    return cfg;
}

Config Config::from_text(std::string text) {
    Config cfg;
    cfg.text_ = std::move(text);
    std::istringstream in(cfg.text_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        const auto hash = view.find('#');
        if (hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key{trim(view.substr(0, eq))};
        const std::string value{trim(view.substr(eq + 1))};
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("config is missing required key '" + key + "'", key);
    return it->second;
}

double Config::real(const std::string& key) const {
    const std::string& s = raw(key);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("config key '" + key + "': invalid number '" + s + "'", key);
    return v;
}

std::uint64_t Config::uint(const std::string& key) const {
    const std::string& s = raw(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("config key '" + key + "': invalid integer '" + s + "'", key);
    return v;
}

double Config::real_or(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
}

std::uint64_t Config::uint_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? uint(key) : fallback;
}

std::string Config::str_or(const std::string& key, std::string fallback) const {
    return has(key) ? raw(key) : std::move(fallback);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

std::string format_double(double v) {
    char tmp[40];
    const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
    return std::string(tmp, res.ptr);
}

std::string format_double(double v, int precision) {
    char tmp[48];
    const auto res =
        std::to_chars(tmp, tmp + sizeof tmp, v, std::chars_format::general, precision);
    return std::string(tmp, res.ptr);
}

void write_manifest(const std::filesystem::path& dir, const Manifest& manifest) {
    nlohmann::ordered_json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["subcommand"] = manifest.subcommand;
    j["config_digest"] = manifest.config_digest;
    j["seed"] = manifest.seed;
    j["outputs"] = manifest.outputs;
    j["wall_clock_seconds"] = manifest.wall_clock_seconds;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest in '" + dir.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error("manifest write failed in '" + dir.string() + "'");
}

SimConfig sim_config_from(const Config& config) {
    SimConfig sim{
        .agents = config.uint("agents"),
        .sweeps = config.uint("sweeps"),
        .dist = parse_distribution_spec(config.raw("dist"), config.base_dir()),
        .seed = config.uint_or("seed", 1),
        .measure_every = config.uint_or("measure_every", 0),
        .init = InitKind::egalitarian,
        .snapshot_path = {},
        .total_wealth = config.real_or("total_wealth", 0.0),
    };
    if (sim.agents < 2) throw ConfigError("config key 'agents' must be >= 2", "agents");
    if (sim.sweeps < 1) throw ConfigError("config key 'sweeps' must be >= 1", "sweeps");

    const std::string init = config.str_or("init", "egalitarian");
    if (init == "egalitarian") {
        sim.init = InitKind::egalitarian;
    } else if (init.rfind("snapshot", 0) == 0) {
        sim.init = InitKind::from_snapshot;
        std::string rest = init.size() > 8 ? init.substr(8) : std::string{};
        while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
        if (rest.empty())
            throw ConfigError("config key 'init': snapshot needs a path", "init");
        std::filesystem::path p = rest;
        if (p.is_relative() && !config.base_dir().empty()) p = config.base_dir() / p;
        sim.snapshot_path = p;
    } else {
        throw ConfigError("config key 'init': unknown mode '" + init + "'", "init");
    }
    return sim;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view header)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open output file '" + path.string() + "'");
    out_ << header << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out_ << ',';
        out_ << format_double(v);
        first = false;
    }
    out_ << '\n';
    if (!out_) throw Error("write failed for '" + path_.string() + "'");
}

void CsvWriter::raw_row(std::string_view line) {
    out_ << line << '\n';
    if (!out_) throw Error("write failed for '" + path_.string() + "'");
}

} // namespace aexch::cli
