#include "affqetu/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace aff {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

using nlohmann::json;

json bounds_json(const SpectrumBounds& b) {
    return json{{"lower", b.lower}, {"upper", b.upper}};
}

json config_json(const AFFConfig& c) {
    return json{
        {"tfim",
         {{"sites", c.tfim.sites},
          {"coupling", c.tfim.coupling},
          {"field", c.tfim.field}}},
        {"stages", c.stages},
        {"degree", c.degree},
        {"mu0", c.mu0},
        {"divisions", c.divisions},
        {"xi1", c.xi1},
        {"xi2", c.xi2},
        {"fourier_d", c.fourier_d},
        {"fourier_beta", c.fourier_beta},
        {"bounds0", bounds_json(c.bounds0)},
        {"noise", {{"p2", c.noise.p2}, {"p1", c.noise.p1}}},
        {"shots_filter", c.shots_filter.total_shots},
        {"shots_profile", c.shots_profile.total_shots},
        {"mode", c.mode == SimMode::Exact ? "exact" : "trotter"},
        {"seed", c.seed},
        {"final_refilter", c.final_refilter},
        {"threads", c.threads},
    };
}

} // namespace

std::string report_to_json(const RunReport& report) {
    json stages = json::array();
    for (const auto& s : report.stages) {
        stages.push_back(json{
            {"index", s.index},
            {"bounds_in", bounds_json(s.bounds_in)},
            {"bounds_out", bounds_json(s.bounds_out)},
            {"mu", s.mu},
            {"success_probability", s.success_probability},
            {"overlap_ground", s.overlap_ground},
            {"time_filter", s.time_filter},
            {"time_profile", s.time_profile},
            {"relaxations", s.relaxations},
            {"profiled", s.profiled},
        });
    }
    json estimates = json::array();
    for (const auto& e : report.estimates) {
        estimates.push_back(json{
            {"method", e.method},
            {"value", e.value},
            {"shots", e.shots},
            {"t_max_contribution", e.t_max_contribution},
        });
    }
    json doc{
        {"schema_version", 1},
        {"config", config_json(report.config)},
        {"stages", stages},
        {"metrics",
         {{"t_max", report.t_max},
          {"t_total", report.t_total},
          {"gamma", report.gamma},
          {"relative_amplification",
           report.amplification_infinite ? json(nullptr)
                                         : json(report.relative_amplification)},
          {"relative_amplification_infinite", report.amplification_infinite}}},
        {"static_repetitions", report.static_repetitions},
        {"estimates", estimates},
    };
    return doc.dump(2) + "\n";
}

std::string stages_to_csv(const RunReport& report) {
    std::ostringstream out;
    out << "i,lambda_lb,lambda_ub,mu,p,overlap\n";
    for (const auto& s : report.stages) {
        out << s.index << ',' << format_value(s.bounds_in.lower) << ','
            << format_value(s.bounds_in.upper) << ',' << format_value(s.mu)
            << ',' << format_value(s.success_probability) << ','
            << format_value(s.overlap_ground) << '\n';
    }
    return out.str();
}

} // namespace aff
