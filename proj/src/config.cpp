#include "hlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& what) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " +
                             what);
}

}  // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text,
                                      const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                parse_fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                parse_fail(origin, lineno, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            parse_fail(origin, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(origin, lineno, "empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (kv.kv_.count(full))
            parse_fail(origin, lineno, "duplicate key '" + full + "'");
        kv.kv_[full] = val;
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

std::string KeyValueFile::get(const std::string& key,
                              const std::string& dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double KeyValueFile::get_num(const std::string& key, double dflt) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error(origin_ + ": field '" + key +
                                 "': not a number: " + it->second);
    return v;
}

int KeyValueFile::get_int(const std::string& key, int dflt) const {
    const double v = get_num(key, dflt);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw std::runtime_error(origin_ + ": field '" + key +
                                 "': not an integer");
    return i;
}

HenonLikeMap standard_map() {
    return HenonLikeMap({cplx(-2.0), cplx(0.0), cplx(1.0)}, cplx(0.1),
                        Bidisk(3.0, 3.0, 0.8, 0.8, 0.9));
}

HenonLikeMap load_map(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::parse_file(path);
    const std::string poly = kv.get("poly", "");
    if (poly.empty())
        throw std::runtime_error(path + ": field 'poly' missing");
    std::istringstream ps(poly);
    std::vector<cplx> coeffs;
    double re, im;
    while (ps >> re >> im) coeffs.emplace_back(re, im);
    if (coeffs.size() < 3)
        throw std::runtime_error(path + ": poly needs degree >= 2 "
                                        "(re/im pairs, ascending)");
    const cplx twist(kv.get_num("twist_re", 0.1), kv.get_num("twist_im", 0.0));
    const Bidisk D(kv.get_num("m_radius", 3.0), kv.get_num("n_radius", 3.0),
                   kv.get_num("inner_m_fraction", 0.8),
                   kv.get_num("inner_n_fraction", 0.8),
                   kv.get_num("margin_fraction", 0.9));
    return HenonLikeMap(std::move(coeffs), twist, D);
}

void ExperimentConfig::validate() const {
    if (resolution < 8)
        throw std::runtime_error("config: resolution must be >= 8");
    if (tolerance <= 0.0)
        throw std::runtime_error("config: tolerances must be positive");
    if (threads < 1) throw std::runtime_error("config: threads must be >= 1");
}

void ExperimentConfig::apply(const KeyValueFile& kv) {
    map_file = kv.get("map", map_file);
    resolution = kv.get_int("resolution", resolution);
    seed = static_cast<std::uint64_t>(kv.get_num("seed", static_cast<double>(seed)));
    route = kv.get("route", route);
    tolerance = kv.get_num("tolerance", tolerance);
    out_dir = kv.get("out_dir", out_dir);
    threads = kv.get_int("threads", threads);
    validate();
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    ExperimentConfig cfg;
    cfg.apply(KeyValueFile::parse_file(path));
    return cfg;
}

std::map<std::string, std::string> ExperimentConfig::snapshot() const {
    return {{"map", map_file},
            {"resolution", std::to_string(resolution)},
            {"seed", std::to_string(seed)},
            {"route", route},
            {"tolerance", format_scalar(tolerance)},
            {"out_dir", out_dir},
            {"threads", std::to_string(threads)}};
}

std::string format_scalar(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for checksum: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string s = ss.str();
    return fnv1a(s.data(), s.size());
}

RunManifest::RunManifest(std::string command, const ExperimentConfig& cfg)
    : command_(std::move(command)), config_(cfg.snapshot()) {}

void RunManifest::add_output(const std::string& path) {
    outputs_.push_back({path, file_checksum(path)});
}

void RunManifest::add_check(const std::string& name, double value,
                            bool pass) {
    checks_.push_back({name, value, pass});
}

void RunManifest::add_note(const std::string& key, const std::string& value) {
    notes_[key] = value;
}

bool RunManifest::all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(),
                       [](const Check& c) { return c.pass; });
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command_;
    j["version"] = "hlab 0.1.0";
    j["config"] = config_;
    j["wall_seconds"] = wall_seconds_;
    j["outputs"] = nlohmann::json::array();
    for (const Output& o : outputs_) {
        nlohmann::json e;
        e["file"] = std::filesystem::path(o.path).filename().string();
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(o.checksum));
        e["fnv1a"] = buf;
        j["outputs"].push_back(e);
    }
    j["checks"] = nlohmann::json::array();
    for (const Check& c : checks_) {
        nlohmann::json e;
        e["name"] = c.name;
        e["value"] = format_scalar(c.value);
        e["pass"] = c.pass;
        j["checks"].push_back(e);
    }
    for (const auto& [k, v] : notes_) j["notes"][k] = v;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

std::vector<ReportRow> aggregate_report(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<ReportRow> rows;
    if (!fs::exists(dir)) return rows;
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() > 14 &&
            name.substr(name.size() - 14) == "-manifest.json")
            manifests.push_back(e.path());
    }
    std::sort(manifests.begin(), manifests.end());
    for (const fs::path& mp : manifests) {
        const std::string run =
            mp.filename().string().substr(0, mp.filename().string().size() - 14);
        nlohmann::json j;
        try {
            std::ifstream in(mp);
            in >> j;
        } catch (const std::exception&) {
            rows.push_back({run, "manifest", "", "incomplete"});
            continue;
        }
        for (const auto& c : j.value("checks", nlohmann::json::array())) {
            ReportRow r;
            r.run = run;
            r.check = c.value("name", "?");
            r.value = c.value("value", "");
            if (!c.contains("pass"))
                r.status = "incomplete";
            else
                r.status = c["pass"].get<bool>() ? "pass" : "fail";
            rows.push_back(r);
        }
        for (const auto& o : j.value("outputs", nlohmann::json::array())) {
            ReportRow r;
            r.run = run;
            const std::string file = o.value("file", "?");
            r.check = "checksum:" + file;
            r.value = o.value("fnv1a", "");
            const fs::path fp = mp.parent_path() / file;
            if (!fs::exists(fp)) {
                r.status = "missing";
            } else {
                char buf[20];
                std::snprintf(
                    buf, sizeof buf, "%016llx",
                    static_cast<unsigned long long>(file_checksum(fp.string())));
                r.status = r.value == buf ? "pass" : "mismatch";
            }
            rows.push_back(r);
        }
    }
    return rows;
}

void write_report_csv(const std::string& path,
                      const std::vector<ReportRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "run,check,value,status\n";
    for (const ReportRow& r : rows)
        out << r.run << ',' << r.check << ',' << r.value << ',' << r.status
            << "\n";
}

}  // namespace hlab
