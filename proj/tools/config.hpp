#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affqetu/aff.hpp"
#include "affqetu/estimators.hpp"

namespace afftool {

/// Flat section.key=value configuration with a fixed schema; unknown keys
/// are rejected at parse time.
class Config {
public:
    static Config defaults();
    static Config from_file(const std::string& path);

    void apply_override(const std::string& assignment); // "sec.key=value"
    void validate_keys() const;

    std::string get(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long get_long(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    std::vector<double> get_list(const std::string& section,
                                 const std::string& key) const;
    void set(const std::string& section, const std::string& key,
             const std::string& value);

    /// Canonical INI text; parsing it reproduces this config.
    std::string echo() const;

    aff::TFIMParams tfim() const;
    aff::SpectrumBounds bounds(const aff::TFIMParams& params) const;
    aff::NoiseModel noise() const;
    aff::AFFConfig aff_config() const;
    aff::RPEConfig rpe_config() const;
    aff::QCELSConfig qcels_config() const;
    aff::SimMode mode() const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace afftool
