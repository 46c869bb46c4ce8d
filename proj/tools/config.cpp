#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace afftool {

namespace {

// schema: every recognized section.key with its default value
const std::map<std::string, std::map<std::string, std::string>>& schema() {
    static const std::map<std::string, std::map<std::string, std::string>> s = {
        {"tfim", {{"sites", "6"}, {"coupling", "1"}, {"field", "1"}}},
        {"bounds", {{"lower", "auto"}, {"upper", "auto"}}},
        {"filter",
         {{"degree", "14"},
          {"mu0", "0.95"},
          {"stages", "3"},
          {"divisions", "auto"},
          {"halfwidth", "0"},
          {"final_refilter", "false"}}},
        {"profiling",
         {{"fourier_d", "7"},
          {"beta", "5"},
          {"xi1", "0.03"},
          {"xi2", "0.02"},
          {"grid", "1001"},
          {"shots", "1000"},
          {"state", "filtered"}}},
        {"noise", {{"p2", "0"}, {"p1", "auto"}}},
        {"run",
         {{"mode", "exact"},
          {"seed", "1"},
          {"shots_filter", "10000"},
          {"threads", "1"},
          {"repetitions", "3"}}},
        {"estimate",
         {{"method", "rpe"},
          {"state", "aff"},
          {"shots", "10000"},
          {"depth", "8"},
          {"tau", "0.2"},
          {"samples", "5"},
          {"stages", "9"},
          {"theta_prev", "auto"},
          {"lambda_lb", "auto"},
          {"lambda_ub", "auto"},
          {"steps_per_unit", "24"}}},
        {"theory",
         {{"lt0", "0.01"},
          {"lt1", "0.05"},
          {"gamma_min", "1"},
          {"gamma_max", "120"},
          {"gamma_steps", "400"},
          {"a0", "0.984"},
          {"delta_a_min", "0.001"},
          {"delta_a_max", "0.01"},
          {"delta_a_steps", "10"},
          {"eps_min", "0.001"},
          {"eps_max", "0.1"},
          {"eps_steps", "10"}}},
        {"output", {{"dir", "runs"}}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::defaults() {
    Config c;
    c.values_ = schema();
    return c;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    Config c = defaults();
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": key outside any section");
        }
        c.set(section, key, value);
    }
    return c;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
    const auto& s = schema();
    const auto sec = s.find(section);
    if (sec == s.end() || sec->second.find(key) == sec->second.end()) {
        throw ConfigError("unknown configuration key: " + section + "." + key);
    }
    values_[section][key] = value;
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError("override must look like section.key=value: " +
                          assignment);
    }
    set(trim(assignment.substr(0, dot)),
        trim(assignment.substr(dot + 1, eq - dot - 1)),
        trim(assignment.substr(eq + 1)));
}

void Config::validate_keys() const {
    // construction guarantees schema conformance; nothing extra to do
}

std::string Config::get(const std::string& section,
                        const std::string& key) const {
    const auto sec = values_.find(section);
    if (sec == values_.end()) throw ConfigError("missing section " + section);
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) {
        throw ConfigError("missing key " + section + "." + key);
    }
    return it->second;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key + ": not a number: " + v);
    }
}

long Config::get_long(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t used = 0;
        const long l = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return l;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key + ": not an integer: " + v);
    }
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(section + "." + key + ": not a boolean: " + v);
}

std::vector<double> Config::get_list(const std::string& section,
                                     const std::string& key) const {
    const std::string v = get(section, key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError(section + "." + key + ": bad list entry: " + item);
        }
    }
    return out;
}

std::string Config::echo() const {
    std::ostringstream out;
    for (const auto& [section, keys] : values_) {
        out << '[' << section << "]\n";
        for (const auto& [key, value] : keys) {
            out << key << " = " << value << '\n';
        }
        out << '\n';
    }
    return out.str();
}

aff::TFIMParams Config::tfim() const {
    aff::TFIMParams p;
    p.sites = int(get_long("tfim", "sites"));
    p.coupling = get_double("tfim", "coupling");
    p.field = get_double("tfim", "field");
    p.validate();
    return p;
}

aff::SpectrumBounds Config::bounds(const aff::TFIMParams& params) const {
    if (get("bounds", "lower") == "auto" || get("bounds", "upper") == "auto") {
        return aff::default_bounds(params);
    }
    aff::SpectrumBounds b{get_double("bounds", "lower"),
                          get_double("bounds", "upper")};
    b.validate();
    return b;
}

aff::NoiseModel Config::noise() const {
    const double p2 = get_double("noise", "p2");
    if (get("noise", "p1") == "auto") {
        return aff::NoiseModel::depolarizing(p2);
    }
    return aff::NoiseModel::depolarizing(p2, get_double("noise", "p1"));
}

aff::SimMode Config::mode() const {
    const std::string m = get("run", "mode");
    if (m == "exact") return aff::SimMode::Exact;
    if (m == "trotter") return aff::SimMode::Trotter;
    throw ConfigError("run.mode must be exact or trotter, got " + m);
}

aff::AFFConfig Config::aff_config() const {
    aff::AFFConfig cfg;
    cfg.tfim = tfim();
    cfg.stages = int(get_long("filter", "stages"));
    cfg.degree = int(get_long("filter", "degree"));
    cfg.mu0 = get_double("filter", "mu0");
    if (get("filter", "divisions") == "auto") {
        cfg.divisions = aff::AFFConfig::default_divisions(cfg.stages);
    } else {
        cfg.divisions = get_list("filter", "divisions");
    }
    cfg.xi1 = get_double("profiling", "xi1");
    cfg.xi2 = get_double("profiling", "xi2");
    cfg.fourier_d = int(get_long("profiling", "fourier_d"));
    cfg.fourier_beta = get_double("profiling", "beta");
    cfg.grid_size = int(get_long("profiling", "grid"));
    cfg.bounds0 = bounds(cfg.tfim);
    cfg.noise = noise();
    const auto seed = std::uint64_t(get_long("run", "seed"));
    cfg.shots_filter =
        aff::ShotBudget{get_long("run", "shots_filter"), aff::splitmix64(seed)};
    cfg.shots_profile = aff::ShotBudget{get_long("profiling", "shots"),
                                        aff::splitmix64(seed ^ 0x9e0)};
    cfg.mode = mode();
    cfg.seed = seed;
    cfg.final_refilter = get_bool("filter", "final_refilter");
    cfg.halfwidth_override = get_double("filter", "halfwidth");
    cfg.threads = int(get_long("run", "threads"));
    cfg.validate();
    return cfg;
}

aff::RPEConfig Config::rpe_config() const {
    aff::RPEConfig cfg;
    cfg.depth = int(get_long("estimate", "depth"));
    cfg.shots = get_long("estimate", "shots");
    cfg.noise = noise();
    cfg.mode = mode();
    cfg.seed = aff::splitmix64(std::uint64_t(get_long("run", "seed")) ^ 0xe57);
    cfg.threads = int(get_long("run", "threads"));
    cfg.steps_per_unit = int(get_long("estimate", "steps_per_unit"));
    return cfg;
}

aff::QCELSConfig Config::qcels_config() const {
    aff::QCELSConfig cfg;
    cfg.stages = int(get_long("estimate", "stages"));
    cfg.shots = get_long("estimate", "shots");
    cfg.samples = int(get_long("estimate", "samples"));
    cfg.tau = get_double("estimate", "tau");
    cfg.noise = noise();
    cfg.mode = mode();
    cfg.seed = aff::splitmix64(std::uint64_t(get_long("run", "seed")) ^ 0xace);
    cfg.threads = int(get_long("run", "threads"));
    cfg.steps_per_unit = int(get_long("estimate", "steps_per_unit"));
    return cfg;
}

} // namespace afftool
