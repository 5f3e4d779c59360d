// test_cli.cpp — argument parsing, writers, sidecar round trip and the fockladder binary

#include "fockladder/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fockladder;
using namespace fockladder::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::initializer_list<std::string> args) { return parse_args(std::vector<std::string>(args)); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("fockladder_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] std::string stem(const std::string& name) const { return (path_ / name).string(); }
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
    static inline int counter_ = 0;
};

int run_quiet(const RunConfig& c, std::string* err_text = nullptr) {
    std::ostringstream log, err;
    const int code = run(c, log, err);
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST(ParseArgs, ValidateUsesDefaults) {
    const RunConfig c = parse({"validate"});
    EXPECT_EQ(c.command, Command::validate);
    EXPECT_EQ(c.params, (SystemParams{100, 0.0, 0.5, 0.0, 0.01}));
    EXPECT_EQ(c.format, Format::csv);
    EXPECT_EQ(c.phi_grid, (GridSpec{0.0, 0.5 * std::numbers::pi, 121}));
    EXPECT_EQ(c.mu_grid, (GridSpec{-0.6, 0.1, 71}));
    EXPECT_EQ(c.ns, (std::vector<int>{20, 40, 60, 80, 100}));
    EXPECT_FALSE(c.fluxes.has_value());
}

TEST(ParseArgs, CurrentScanConfig) {
    const RunConfig c = parse({"current-scan", "--n", "100", "--xi", "0.5", "--mu", "0"});
    EXPECT_EQ(c.command, Command::current_scan);
    EXPECT_EQ(c.params.N, 100);
    EXPECT_EQ(c.params.xi, 0.5);
    EXPECT_EQ(c.params.mu, 0.0);
    EXPECT_EQ(c.phi_grid.values().size(), 121u);
}

TEST(ParseArgs, ListsAndFormats) {
    const RunConfig c = parse({"fss", "--ns", "20,40,60", "--format", "json", "--out", "x/y"});
    EXPECT_EQ(c.ns, (std::vector<int>{20, 40, 60}));
    EXPECT_EQ(c.format, Format::json);
    EXPECT_EQ(c.out, "x/y");
    const RunConfig b = parse({"bands", "--fluxes", "0.1,0.2"});
    ASSERT_TRUE(b.fluxes.has_value());
    EXPECT_EQ(*b.fluxes, (std::vector<double>{0.1, 0.2}));
    EXPECT_FALSE(parse({"bands", "--fluxes", "auto"}).fluxes.has_value());
}

TEST(ParseArgs, EntropyScanDropsZeroFlux) {
    const RunConfig c = parse({"entropy-scan"});
    EXPECT_GT(c.phi_grid.min, 0.0);
    EXPECT_EQ(c.phi_grid.points, 120u);
    EXPECT_NEAR(c.phi_grid.values().front(), experiments::default_flux_grid()[1], 1e-15);
    EXPECT_DOUBLE_EQ(c.phi_grid.values().back(), 0.5 * std::numbers::pi);
    EXPECT_EQ(parse({"entropy-scan", "--phi-min", "0.2"}).phi_grid.min, 0.2);
}

TEST(ParseArgs, UsageErrorsNameTheFlag) {
    auto message = [](std::initializer_list<std::string> args) {
        try {
            parse(args);
        } catch (const UsageError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message({"ground", "--n", "101"}).find("--n"), std::string::npos);
    EXPECT_NE(message({"ground", "--tau", "0"}).find("--tau"), std::string::npos);
    EXPECT_NE(message({"ground", "--tau", "-1"}).find("--tau"), std::string::npos);
    EXPECT_NE(message({"ground", "--bogus", "1"}).find("--bogus"), std::string::npos);
    EXPECT_NE(message({"ground", "--xi", "nan"}).find("--xi"), std::string::npos);
    EXPECT_NE(message({"ground", "--format", "xml"}).find("--format"), std::string::npos);
    EXPECT_NE(message({"fss", "--ns", "20,x"}).find("--ns"), std::string::npos);
    EXPECT_NE(message({"fss", "--ns", "20,41"}).find("--ns"), std::string::npos);
    EXPECT_NE(message({"current-scan", "--phi-points", "0"}).find("--phi-points"), std::string::npos);
    EXPECT_NE(message({"current-scan", "--phi-min", "1", "--phi-max", "0.5"}).find("--phi-max"), std::string::npos);
    EXPECT_NE(message({"teleport"}).find("teleport"), std::string::npos);
    EXPECT_THROW(parse({}), UsageError);
    EXPECT_THROW(parse({"--help"}), HelpRequested);
}

TEST(Sidecar, JsonRoundTrip) {
    for (const RunConfig& c : {parse({"validate"}), parse({"bands", "--fluxes", "0.3,1.0", "--format", "json"}),
                               parse({"fss", "--ns", "20,30,40", "--mu-points", "11", "--tau", "0.002"}),
                               parse({"entropy-scan", "--n", "40", "--phi-points", "7"})}) {
        EXPECT_EQ(config_from_json(to_json(c)), c);
        EXPECT_EQ(config_from_json(json::parse(to_json(c).dump())), c);
    }
    json broken = to_json(parse({"validate"}));
    broken["n"] = 7;
    EXPECT_THROW(config_from_json(broken), UsageError);
    broken.erase("n");
    EXPECT_THROW(config_from_json(broken), UsageError);
}

TEST(Writers, NumberFormattingAndQuoting) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(-75.0), "-75");
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(OutputPaths("out/run.csv").data(Format::json, "fit").string(), "out/run_fit.json");
    EXPECT_EQ(OutputPaths("out/run").sidecar().string(), "out/run.meta.json");
}

TEST(Run, CurrentScanWritesDeterministicCsvAndSidecar) {
    TempDir dir;
    const RunConfig c = parse({"current-scan", "--n", "20", "--phi-points", "5", "--out", dir.stem("scan")});
    ASSERT_EQ(run_quiet(c), 0);
    const std::string first = slurp(dir.path() / "scan.csv");
    ASSERT_EQ(run_quiet(c), 0);
    EXPECT_EQ(slurp(dir.path() / "scan.csv"), first);

    std::istringstream lines(first);
    std::string header, row;
    std::getline(lines, header);
    EXPECT_NE(header.find("phi [rad]"), std::string::npos);
    EXPECT_NE(header.find("2J_C/(NJ) numeric [1]"), std::string::npos);
    EXPECT_EQ(header.back(), '\r');
    int rows = 0;
    while (std::getline(lines, row)) ++rows;
    EXPECT_EQ(rows, 5);

    EXPECT_EQ(config_from_sidecar(dir.path() / "scan.meta.json"), c);
    const json meta = json::parse(slurp(dir.path() / "scan.meta.json"));
    EXPECT_EQ(meta.at("version").get<std::string>(), std::string(kVersion));
    EXPECT_GE(meta.at("wall_time_s").get<double>(), 0.0);
    EXPECT_TRUE(meta.at("results").contains("peak_phi"));
}

TEST(Run, GroundAndEntropyScanJson) {
    TempDir dir;
    ASSERT_EQ(run_quiet(parse({"ground", "--n", "20", "--phi", "1.0", "--format", "json", "--out", dir.stem("g")})), 0);
    const json g = json::parse(slurp(dir.path() / "g.json"));
    EXPECT_EQ(g.at("legs").size(), 2u);
    EXPECT_EQ(g.at("legs")[0].at("density").size(), 21u);
    const json meta = json::parse(slurp(dir.path() / "g.meta.json"));
    EXPECT_LT(meta.at("results").at("quasienergy").get<double>(), 0.0);

    ASSERT_EQ(run_quiet(parse({"entropy-scan", "--n", "20", "--phi-points", "4", "--out", dir.stem("s")})), 0);
    const std::string csv = slurp(dir.path() / "s.csv");
    EXPECT_NE(csv.find("S numeric [nat]"), std::string::npos);
}

TEST(Run, BandsAutoWritesThreePanels) {
    TempDir dir;
    ASSERT_EQ(run_quiet(parse({"bands", "--n", "20", "--fluxes", "auto", "--out", dir.stem("b")})), 0);
    for (int k = 0; k < 3; ++k)
        for (const char* part : {"bands", "density", "ground"})
            EXPECT_TRUE(fs::exists(dir.path() / ("b_panel" + std::to_string(k) + "_" + part + ".csv")));
    const json meta = json::parse(slurp(dir.path() / "b.meta.json"));
    const auto& panels = meta.at("results").at("panels");
    ASSERT_EQ(panels.size(), 3u);
    const double c = meanfield::critical_flux(0.5);
    EXPECT_DOUBLE_EQ(panels[0].at("phi").get<double>(), 0.5 * c);
    EXPECT_DOUBLE_EQ(panels[1].at("phi").get<double>(), c);
    EXPECT_DOUBLE_EQ(panels[2].at("phi").get<double>(), 1.5 * c);

    ASSERT_EQ(run_quiet(parse({"bands", "--n", "20", "--format", "json", "--out", dir.stem("bj")})), 0);
    const json bj = json::parse(slurp(dir.path() / "bj.json"));
    EXPECT_EQ(bj.at("panels").size(), 3u);
    EXPECT_EQ(bj.at("panels")[0].at("density_left").size(), 21u);
}

TEST(Run, FssAndMuScanOnSmallGrids) {
    TempDir dir;
    ASSERT_EQ(run_quiet(parse({"fss", "--ns", "20,24,28", "--mu-points", "11", "--phi-points", "31", "--out",
                               dir.stem("f")})),
              0);
    EXPECT_TRUE(fs::exists(dir.path() / "f.csv"));
    const std::string fit = slurp(dir.path() / "f_fit.csv");
    EXPECT_NE(fit.find("intercept [1]"), std::string::npos);
    const json meta = json::parse(slurp(dir.path() / "f.meta.json"));
    EXPECT_TRUE(meta.at("results").contains("slope"));

    std::string err;
    EXPECT_EQ(run_quiet(parse({"mu-scan", "--n", "20", "--xi", "3", "--mu-min", "0.5", "--mu-max", "0.7", "--mu-points",
                               "3", "--phi-points", "13", "--out", dir.stem("m")}),
                        &err),
              1);
    EXPECT_NE(err.find("boundary"), std::string::npos) << err;
    EXPECT_NE(err.find("N=20"), std::string::npos) << err;
}

TEST(Run, ValidatePrintsPassLines) {
    TempDir dir;
    std::ostringstream log, err;
    EXPECT_EQ(run(parse({"validate", "--n", "20", "--out", dir.stem("v")}), log, err), 0) << err.str();
    EXPECT_NE(log.str().find("PASS floquet unitarity"), std::string::npos);
    EXPECT_EQ(log.str().find("FAIL"), std::string::npos);
}

TEST(Run, MissingOutputDirectoryFailsBeforeCompute) {
    std::string err;
    EXPECT_EQ(run_quiet(parse({"fss", "--out", "/nonexistent/dir/stem"}), &err), 1);
    EXPECT_NE(err.find("does not exist"), std::string::npos);
}

TEST(Binary, ExitCodes) {
    TempDir dir;
    auto status = [](const std::string& args) {
        const int raw = std::system((std::string(FOCKLADDER_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("--n 101 ground"), 2);
    EXPECT_EQ(status("ground --n 101"), 2);
    EXPECT_EQ(status("ground --unknown"), 2);
    EXPECT_EQ(status("--help"), 0);
    EXPECT_EQ(status("ground --n 20 --out " + dir.stem("g")), 0);
    EXPECT_TRUE(fs::exists(dir.path() / "g.csv"));
}
