#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "affqetu/estimators.hpp"
#include "affqetu/report.hpp"
#include "config.hpp"

using namespace aff;
using afftool::Config;
using afftool::ConfigError;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", std::gmtime(&t));
    return buf;
}

/// Run directory with manifest bookkeeping; every artifact goes through
/// write() so its checksum lands in the manifest, which is written last.
class RunDir {
public:
    RunDir(const Config& config, const std::string& command,
           const std::string& out_flag) {
        std::string base = config.get("output", "dir");
        if (!out_flag.empty()) base = out_flag;
        if (const char* env = std::getenv("AFFQETU_OUT")) base = env;
        const auto seed = config.get_long("run", "seed");
        started_ = iso_timestamp();
        fs::path dir = fs::path(base) /
                       (started_ + "-" + std::to_string(seed));
        for (int suffix = 1; fs::exists(dir); ++suffix) {
            dir = fs::path(base) /
                  (started_ + "-" + std::to_string(seed) + "-" +
                   std::to_string(suffix));
        }
        fs::create_directories(dir);
        dir_ = dir;
        command_ = command;
        config_echo_ = config.echo();
        write("config_echo.ini", config_echo_);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        checksums_[name] = hex;
    }

    void finalize(const Config& config) {
        nlohmann::json manifest{
            {"tool", "affqetu"},
            {"version", kVersion},
            {"command", command_},
            {"seed", config.get_long("run", "seed")},
            {"started", started_},
            {"finished", iso_timestamp()},
            {"files", checksums_},
        };
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
        std::cout << dir_.string() << "\n";
    }

    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
    std::string command_;
    std::string started_;
    std::string config_echo_;
    std::map<std::string, std::string> checksums_;
};

std::string spectrum_csv(const SpectralDecomposition& d) {
    std::ostringstream out;
    out << "index,eigenvalue\n";
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
        out << j << ',' << format_value(d.eigenvalues(j)) << '\n';
    }
    return out.str();
}

CVector prepare_state(const std::string& kind, const Config& config,
                      const HermitianOperator& ham, PhaseCache& cache,
                      RunReport* aff_report) {
    const auto seed = std::uint64_t(config.get_long("run", "seed"));
    if (kind == "ground") {
        return ham.decomposition().eigenvectors.col(0);
    }
    if (kind == "zero") {
        return basis_state(ham.qubits(), 0);
    }
    if (kind == "random") {
        RngStream rng{seed};
        return haar_random_state(ham.dim(), rng);
    }
    if (kind == "filtered") {
        // one pass of the first filter on a seeded random state
        AFFConfig cfg = config.aff_config();
        cfg.stages = 1;
        cfg.divisions = AFFConfig::default_divisions(1);
        RngStream rng{seed};
        const CVector psi = haar_random_state(ham.dim(), rng);
        const RunReport rep = run_aff(cfg, psi, ham, &cache);
        if (aff_report) *aff_report = rep;
        return rep.final_state;
    }
    if (kind == "aff") {
        AFFConfig cfg = config.aff_config();
        RngStream rng{seed};
        const CVector psi = haar_random_state(ham.dim(), rng);
        const RunReport rep = run_aff(cfg, psi, ham, &cache);
        if (aff_report) *aff_report = rep;
        return rep.final_state;
    }
    throw ConfigError("unknown state kind: " + kind);
}

void emit_run_report(RunDir& dir, const RunReport& report) {
    dir.write("report.json", report_to_json(report));
    dir.write("stages.csv", stages_to_csv(report));
    for (const auto& stage : report.stages) {
        if (!stage.profiled) continue;
        std::ostringstream csv;
        write_cdf_csv(stage.profile, csv);
        dir.write("cdf_" + std::to_string(stage.index) + ".csv", csv.str());
    }
}

int cmd_spectrum(const Config& config, const std::string& out_flag) {
    const auto params = config.tfim();
    const auto ham = build_tfim(params);
    const auto& d = ham.decomposition();
    const auto bounds = config.bounds(params);
    const auto gaps = spectral_gaps(d, bounds);

    RunDir dir(config, "spectrum", out_flag);
    dir.write("spectrum.csv", spectrum_csv(d));
    nlohmann::json summary{
        {"lambda0", d.eigenvalues(0)},
        {"delta", gaps.delta},
        {"delta_a", gaps.delta_a},
        {"a0", gaps.a0},
        {"a1", gaps.a1},
        {"bounds", {{"lower", bounds.lower}, {"upper", bounds.upper}}},
    };
    dir.write("summary.json", summary.dump(2) + "\n");
    dir.finalize(config);
    return 0;
}

int cmd_aff(const Config& config, const std::string& out_flag) {
    const auto cfg = config.aff_config();
    const auto ham = build_tfim(cfg.tfim);
    RngStream rng{cfg.seed};
    const CVector psi = haar_random_state(ham.dim(), rng);
    PhaseCache cache;
    const RunReport report = run_aff(cfg, psi, ham, &cache);
    RunDir dir(config, "aff", out_flag);
    emit_run_report(dir, report);
    dir.finalize(config);
    return 0;
}

int cmd_static(const Config& config, const std::string& out_flag) {
    const auto cfg = config.aff_config();
    const long reps = config.get_long("run", "repetitions");
    const auto ham = build_tfim(cfg.tfim);
    RngStream rng{cfg.seed};
    const CVector psi = haar_random_state(ham.dim(), rng);
    PhaseCache cache;
    const RunReport report = run_static(cfg, reps, psi, ham, &cache);
    RunDir dir(config, "static", out_flag);
    emit_run_report(dir, report);
    dir.finalize(config);
    return 0;
}

int cmd_profile(const Config& config, const std::string& out_flag) {
    const auto cfg = config.aff_config();
    const auto ham = build_tfim(cfg.tfim);
    PhaseCache cache;
    const CVector state = prepare_state(config.get("profiling", "state"),
                                        config, ham, cache, nullptr);
    const auto acq = acquire_moments(state, ham, cfg.bounds0, cfg.fourier_d,
                                     cfg.shots_profile, cfg.noise, cfg.mode,
                                     &cfg.tfim, cfg.threads);
    const auto fc = fourier_coefficients(cfg.fourier_d, cfg.fourier_beta);
    CDFProfile profile = build_cdf(acq.moments, fc, cfg.grid_size);
    differentiate(profile);

    RunDir dir(config, "profile", out_flag);
    nlohmann::json summary;
    int exit_code = 0;
    try {
        double xi2 = cfg.xi2;
        SpectrumBounds window{0, 0};
        int attempt = 0;
        for (;; ++attempt) {
            try {
                window = extract_bounds(profile, cfg.xi1, xi2, cfg.bounds0);
                break;
            } catch (const NoQualifyingIntervalError&) {
                if (attempt >= 3) throw;
                xi2 *= 2.0;
            }
        }
        summary["window"] = {{"lower", window.lower}, {"upper", window.upper}};
        summary["relaxations"] = attempt;
    } catch (const NoQualifyingIntervalError& e) {
        summary["window"] = nullptr;
        summary["error"] = e.what();
        exit_code = 4;
    }
    std::ostringstream csv;
    write_cdf_csv(profile, csv);
    dir.write("cdf.csv", csv.str());
    summary["max_imag_residual"] = profile.max_imag_residual;
    dir.write("summary.json", summary.dump(2) + "\n");
    dir.finalize(config);
    return exit_code;
}

int cmd_estimate(const Config& config, const std::string& out_flag) {
    const auto params = config.tfim();
    const auto ham = build_tfim(params);
    PhaseCache cache;
    RunReport report;
    report.config = config.aff_config();
    const CVector state = prepare_state(config.get("estimate", "state"), config,
                                        ham, cache, &report);
    const std::string method = config.get("estimate", "method");
    const long shots = config.get_long("estimate", "shots");
    EstimateRecord record;
    record.method = method;
    record.shots = shots;
    if (method == "dem") {
        const ShotBudget budget{shots, splitmix64(std::uint64_t(
                                           config.get_long("run", "seed")))};
        record.value = dem_energy(state, params, budget, config.noise());
        record.t_max_contribution = 0.0;
    } else if (method == "rpe") {
        RPEConfig cfg = config.rpe_config();
        if (config.get("estimate", "theta_prev") == "auto") {
            cfg.theta_prev = dem_energy_exact(state, params);
        } else {
            cfg.theta_prev = config.get_double("estimate", "theta_prev");
        }
        record.value = rpe_estimate(state, ham, params, cfg);
        record.t_max_contribution = std::ldexp(1.0, cfg.depth - 1);
    } else if (method == "qcels") {
        QCELSConfig cfg = config.qcels_config();
        const auto bounds = config.bounds(params);
        cfg.lambda_lb = config.get("estimate", "lambda_lb") == "auto"
                            ? bounds.lower
                            : config.get_double("estimate", "lambda_lb");
        cfg.lambda_ub = config.get("estimate", "lambda_ub") == "auto"
                            ? bounds.upper
                            : config.get_double("estimate", "lambda_ub");
        record.value = qcels_estimate(state, ham, params, cfg);
        record.t_max_contribution =
            cfg.tau * std::ldexp(1.0, cfg.stages - 1) * (cfg.samples - 1);
    } else {
        throw ConfigError("estimate.method must be dem, rpe or qcels");
    }
    report.estimates.push_back(record);

    RunDir dir(config, "estimate", out_flag);
    emit_run_report(dir, report);
    nlohmann::json summary{{"method", method},
                           {"value", record.value},
                           {"ground_energy_exact", ham.ground_energy()},
                           {"absolute_error",
                            std::abs(record.value - ham.ground_energy())}};
    dir.write("estimate.json", summary.dump(2) + "\n");
    dir.finalize(config);
    return 0;
}

int cmd_theory(const Config& config, const std::string& out_flag) {
    const double lt0 = config.get_double("theory", "lt0");
    const double lt1 = config.get_double("theory", "lt1");
    const double gmin = config.get_double("theory", "gamma_min");
    const double gmax = config.get_double("theory", "gamma_max");
    const long gsteps = config.get_long("theory", "gamma_steps");

    RunDir dir(config, "theory", out_flag);
    {
        std::ostringstream csv;
        csv << "gamma,stretched_gap\n";
        for (long i = 0; i <= gsteps; ++i) {
            const double g = gmin + (gmax - gmin) * double(i) / double(gsteps);
            csv << format_value(g) << ','
                << format_value(stretch_relation(g, lt0, lt1)) << '\n';
        }
        dir.write("gamma_scan.csv", csv.str());
    }
    const double a0 = config.get_double("theory", "a0");
    auto grid = [&](const char* prefix) {
        const double dmin = config.get_double("theory", "delta_a_min");
        const double dmax = config.get_double("theory", "delta_a_max");
        const long dsteps = config.get_long("theory", "delta_a_steps");
        const double emin = config.get_double("theory", "eps_min");
        const double emax = config.get_double("theory", "eps_max");
        const long esteps = config.get_long("theory", "eps_steps");
        std::ostringstream csv;
        csv << "delta_a,eps,gamma\n";
        for (long i = 0; i <= dsteps; ++i) {
            const double da = dmin + (dmax - dmin) * double(i) / double(dsteps);
            for (long j = 0; j <= esteps; ++j) {
                const double eps =
                    emin + (emax - emin) * double(j) / double(esteps);
                const double g = std::string(prefix) == "static"
                                     ? gamma_static_prediction(a0, da, eps)
                                     : gamma_aff_prediction(a0, da, eps);
                csv << format_value(da) << ',' << format_value(eps) << ','
                    << format_value(g) << '\n';
            }
        }
        return csv.str();
    };
    dir.write("depth_static.csv", grid("static"));
    dir.write("depth_adaptive.csv", grid("adaptive"));
    dir.finalize(config);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenspace-filtering ground-state preparation simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, mode_flag;
    std::vector<std::string> overrides;
    long seed_flag = -1, threads_flag = -1;
    double p2_flag = -1.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (ini)");
        sub->add_option("--seed", seed_flag, "override run.seed");
        sub->add_option("--threads", threads_flag, "override run.threads");
        sub->add_option("--out", out_dir,
                        "output directory (env AFFQETU_OUT wins)");
        sub->add_option("--mode", mode_flag, "exact or trotter");
        sub->add_option("--p2", p2_flag, "two-qubit depolarizing probability");
        sub->add_option("--set", overrides, "extra section.key=value overrides");
    };

    for (const char* name :
         {"spectrum", "aff", "static", "profile", "estimate", "theory"}) {
        add_common(app.add_subcommand(name));
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Config config = config_path.empty() ? Config::defaults()
                                            : Config::from_file(config_path);
        if (seed_flag >= 0) config.set("run", "seed", std::to_string(seed_flag));
        if (threads_flag >= 0) {
            config.set("run", "threads", std::to_string(threads_flag));
        }
        if (!mode_flag.empty()) config.set("run", "mode", mode_flag);
        if (p2_flag >= 0.0) {
            config.set("noise", "p2", format_value(p2_flag));
        }
        for (const auto& o : overrides) config.apply_override(o);

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "spectrum") return cmd_spectrum(config, out_dir);
        if (cmd == "aff") return cmd_aff(config, out_dir);
        if (cmd == "static") return cmd_static(config, out_dir);
        if (cmd == "profile") return cmd_profile(config, out_dir);
        if (cmd == "estimate") return cmd_estimate(config, out_dir);
        if (cmd == "theory") return cmd_theory(config, out_dir);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const BadParametersError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const TooLargeError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateBoundsError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NoAcceptedShotsError& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 3;
    } catch (const ProfilingFailedError& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
