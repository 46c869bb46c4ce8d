#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

#ifndef AFFQETU_CLI_PATH
#define AFFQETU_CLI_PATH "affqetu"
#endif

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AFFQETU_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path only_run_dir(const fs::path& base) {
    fs::path found;
    int count = 0;
    for (const auto& e : fs::directory_iterator(base)) {
        if (e.is_directory()) {
            found = e.path();
            ++count;
        }
    }
    REQUIRE(count == 1);
    return found;
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("identical seeds produce byte-identical artifacts") {
    TempDir a("affqetu_cli_a"), b("affqetu_cli_b");
    const std::string common =
        "aff --seed 7 --set tfim.sites=4 --set profiling.shots=200 "
        "--set run.shots_filter=500 --out ";
    REQUIRE(run_cli(common + a.path.string()) == 0);
    REQUIRE(run_cli(common + b.path.string()) == 0);
    const fs::path ra = only_run_dir(a.path), rb = only_run_dir(b.path);
    for (const char* name : {"stages.csv", "report.json", "cdf_0.csv",
                             "config_echo.ini"}) {
        REQUIRE(slurp(ra / name) == slurp(rb / name));
        REQUIRE(!slurp(ra / name).empty());
    }
}

TEST_CASE("different seeds change the outputs") {
    TempDir a("affqetu_cli_c"), b("affqetu_cli_d");
    const std::string common =
        "aff --set tfim.sites=4 --set profiling.shots=200 "
        "--set run.shots_filter=500 ";
    REQUIRE(run_cli(common + "--seed 1 --out " + a.path.string()) == 0);
    REQUIRE(run_cli(common + "--seed 2 --out " + b.path.string()) == 0);
    REQUIRE(slurp(only_run_dir(a.path) / "stages.csv") !=
            slurp(only_run_dir(b.path) / "stages.csv"));
}

TEST_CASE("config echo reproduces the run") {
    TempDir a("affqetu_cli_e"), b("affqetu_cli_f");
    REQUIRE(run_cli("spectrum --seed 3 --set tfim.sites=5 --out " +
                    a.path.string()) == 0);
    const fs::path echo = only_run_dir(a.path) / "config_echo.ini";
    REQUIRE(fs::exists(echo));
    REQUIRE(run_cli("spectrum --config " + echo.string() + " --out " +
                    b.path.string()) == 0);
    REQUIRE(slurp(only_run_dir(a.path) / "spectrum.csv") ==
            slurp(only_run_dir(b.path) / "spectrum.csv"));
    REQUIRE(slurp(only_run_dir(a.path) / "config_echo.ini") ==
            slurp(only_run_dir(b.path) / "config_echo.ini"));
}

TEST_CASE("unknown keys are rejected with exit code 2") {
    TempDir a("affqetu_cli_g");
    REQUIRE(run_cli("spectrum --set tfim.bogus=1 --out " + a.path.string()) ==
            2);
    REQUIRE(run_cli("aff --set filter.stages=0 --out " + a.path.string()) == 2);
    REQUIRE(run_cli("spectrum --set tfim.sites=44 --out " + a.path.string()) ==
            2);
}

TEST_CASE("manifest lists checksums for every artifact") {
    TempDir a("affqetu_cli_h");
    REQUIRE(run_cli("theory --out " + a.path.string()) == 0);
    const fs::path dir = only_run_dir(a.path);
    const std::string manifest = slurp(dir / "manifest.json");
    for (const char* name :
         {"gamma_scan.csv", "depth_static.csv", "depth_adaptive.csv"}) {
        REQUIRE(fs::exists(dir / name));
        REQUIRE(manifest.find(name) != std::string::npos);
    }
    REQUIRE(manifest.find("\"version\"") != std::string::npos);
}

TEST_CASE("environment variable overrides the output flag") {
    TempDir a("affqetu_cli_i"), b("affqetu_cli_j");
    const std::string cmd = std::string("AFFQETU_OUT=") + b.path.string() +
                            " " + AFFQETU_CLI_PATH +
                            " spectrum --set tfim.sites=3 --out " +
                            a.path.string() + " > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    REQUIRE(fs::is_empty(a.path));
    REQUIRE(!fs::is_empty(b.path));
}
