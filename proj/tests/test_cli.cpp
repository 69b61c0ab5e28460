#include "cli/commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mimo;
using namespace mimo::cli;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_run_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("mimo_test_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
    const RunConfig r = parse_run_config("{}", "cfg.json");
    EXPECT_EQ(r.combos.size(), 6u);
    EXPECT_EQ(r.snr_list.size(), 5u);
    EXPECT_EQ(r.n_trials, 300u);
    EXPECT_EQ(r.trial.params.samples_per_pulse, 508u);
    EXPECT_EQ(r.trial.grid.size(), 150u);
}

TEST(Config, RoundTripThroughJson) {
    RunConfig r = parse_run_config(R"({
      "array": {"placement": "uniform-spaced", "geometry_seed": 9},
      "scene": {"random": false, "targets": [{"range_m": 12.5, "aoa_deg": -4, "gain": [0.5, -0.25]}]},
      "detection": {"threshold_mult": 4.5, "grid_points": 101, "grid_sin": [-0.5, 0.5]},
      "trial": {"method": "classical", "array": "full", "snr_db": null, "index": 3},
      "sweep": {"snr_db": [null, 7.5], "seed": 42, "combos": [{"method": "proposed-omp", "array": "sparse"}]},
      "output": {"dir": "elsewhere", "plots": true}
    })",
                                   "cfg.json");
    const std::string once = to_json(r).dump();
    const RunConfig again = parse_run_config(once, "again.json");
    EXPECT_EQ(to_json(again).dump(), once);
    EXPECT_EQ(again.trial.method, Method::classical);
    EXPECT_FALSE(again.trial.snr_db.has_value());
    EXPECT_EQ(again.trial.sparse.geometry_seed, 9u);
    ASSERT_EQ(again.trial.scene.fixed.size(), 1u);
    EXPECT_NEAR(again.trial.scene.fixed[0].aoa_rad, -4.0 * kPi / 180.0, 1e-15);
    EXPECT_EQ(again.trial.scene.fixed[0].gain, cd(0.5, -0.25));
    EXPECT_FALSE(again.snr_list[0].has_value());
    EXPECT_EQ(again.trial.grid.size(), 101u);
}

TEST(Config, ManifestIsAcceptedAsConfig) {
    RunConfig r = default_run_config();
    r.seed = 99;
    nlohmann::ordered_json m;
    m["manifest_version"] = 1;
    m["command"] = "sweep";
    m["config"] = to_json(r);
    m["seeds"] = {{"master", 99}};
    EXPECT_EQ(parse_run_config(m.dump(), "manifest.json").seed, 99u);
}

TEST(Config, DiagnosticsNameTheField) {
    EXPECT_NE(error_of(R"({"scene": {"kk": 1}})").find("scene.kk': unknown key"), std::string::npos);
    EXPECT_NE(error_of(R"({"bogus": 1})").find("'bogus': unknown key"), std::string::npos);
    EXPECT_NE(error_of(R"({"scene": {"k": 0}})").find("scene.k"), std::string::npos);
    EXPECT_NE(error_of(R"({"scene": {"random": false, "targets": [{"range_m": 5}, {"aoa_deg": 3}]}})")
                  .find("scene.targets[1].range_m"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"trial": {"method": "music"}})").find("trial.method"), std::string::npos);
    EXPECT_NE(error_of(R"({"sweep": {"n_trials": -3}})").find("sweep.n_trials"), std::string::npos);
    EXPECT_NE(error_of(R"({"sweep": {"n_trials": 0}})").find("sweep.n_trials"), std::string::npos);
    EXPECT_NE(error_of(R"({"radar": {"bandwidth_hz": "wide"}})").find("radar.bandwidth_hz"), std::string::npos);
    EXPECT_NE(error_of(R"({"detection": {"grid_sin": [0.5]}})").find("detection.grid_sin"), std::string::npos);
    EXPECT_NE(error_of("[]").find("<root>"), std::string::npos);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
    const std::string e = error_of("{\n  \"scene\": {\"k\": 3,,}\n}\n");
    EXPECT_EQ(e.rfind("cfg.json:2:20:", 0), 0u) << e;
}

TEST(Commands, ExitCodes) {
    const fs::path d = scratch_dir("exit");
    std::ostringstream out, err;
    EXPECT_EQ(run_command("single", (d / "missing.json").string(), {}, out, err), 2);
    std::ofstream(d / "bad.json") << R"({"scene": {"k": 0}})";
    EXPECT_EQ(run_command("sweep", (d / "bad.json").string(), {}, out, err), 2);
    std::ofstream(d / "ok.json") << R"({"output": {"dir": "/proc/no_such_dir"}})";
    EXPECT_EQ(run_command("single", (d / "ok.json").string(), {}, out, err), 3);
    EXPECT_EQ(run_command("dance", (d / "ok.json").string(), {}, out, err), 2);
}

TEST(Commands, NoiselessSingleTargetPrintsAHit) {
    const fs::path d = scratch_dir("single");
    std::ofstream(d / "one.json") << R"({
      "scene": {"random": false, "targets": [{"range_m": 22.0, "aoa_deg": 5.0}]},
      "trial": {"method": "proposed-somp", "snr_db": null}
    })";
    Overrides o;
    o.out_dir = (d / "out").string();
    std::ostringstream out, err;
    ASSERT_EQ(run_command("single", (d / "one.json").string(), o, out, err), 0) << err.str();
    EXPECT_NE(out.str().find("hits 1, false alarms 0, misses 0"), std::string::npos) << out.str();
    const std::string csv = slurp(d / "out" / "single.csv");
    EXPECT_EQ(csv.rfind("kind,index,range_m,aoa_deg,status,matched\ntruth,0,", 0), 0u);
    EXPECT_TRUE(fs::exists(d / "out" / "manifest.json"));
}

TEST(Commands, SweepWritesMetricsAndPlots) {
    const fs::path d = scratch_dir("sweep");
    std::ofstream(d / "s.json") << R"({
      "scene": {"k": 2},
      "sweep": {"snr_db": [20, null], "n_trials": 4, "calibrate": false,
                "combos": [{"method": "proposed-somp", "array": "sparse"}, {"method": "classical", "array": "full"}]}
    })";
    Overrides o;
    o.out_dir = (d / "out").string();
    o.plots = true;
    o.jobs = 2;
    std::ostringstream out, err;
    ASSERT_EQ(run_command("sweep", (d / "s.json").string(), o, out, err), 0) << err.str();
    std::istringstream csv(slurp(d / "out" / "metrics.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "snr_db,method,array,hit_rate,fa_rate,range_rmse_m,angle_rmse_deg,n_trials");
    std::vector<std::string> rows;
    while (std::getline(csv, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].rfind("20.00,proposed-somp,sparse,", 0), 0u);
    EXPECT_EQ(rows[1].rfind("inf,proposed-somp,sparse,", 0), 0u);
    EXPECT_EQ(rows[3].rfind("inf,classical,full,", 0), 0u);
    EXPECT_FALSE(fs::exists(d / "out" / "calibration.csv"));
    const std::string svg = slurp(d / "out" / "hit_rate.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("classical / full"), std::string::npos);
    for (const auto& e : fs::directory_iterator(d / "out")) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Commands, CloseTargetsWritesSpectra) {
    const fs::path d = scratch_dir("close");
    std::ofstream(d / "c.json") << R"({"trial": {"snr_db": null}})";
    Overrides o;
    o.out_dir = (d / "out").string();
    std::ostringstream out, err;
    ASSERT_EQ(run_command("close-targets", (d / "c.json").string(), o, out, err), 0) << err.str();
    for (const char* name : {"classical_integrated.csv", "proposed_pulse_1.csv", "proposed_pulse_2.csv",
                             "proposed_pulse_3.csv", "detections.csv", "truth.csv"})
        EXPECT_TRUE(fs::exists(d / "out" / name)) << name;
    // Stationary targets: every pulse spectrum is the same.
    EXPECT_EQ(slurp(d / "out" / "proposed_pulse_1.csv"), slurp(d / "out" / "proposed_pulse_3.csv"));
    const std::string integrated = slurp(d / "out" / "classical_integrated.csv");
    EXPECT_EQ(integrated.rfind("bin,range_m,magnitude\n0,0.000000,", 0), 0u);
}

TEST(WriteAtomic, ReplacesWholeFile) {
    const fs::path d = scratch_dir("atomic");
    write_atomic(d / "a.csv", "first version, longer\n");
    write_atomic(d / "a.csv", "second\n");
    EXPECT_EQ(slurp(d / "a.csv"), "second\n");
    EXPECT_FALSE(fs::exists(d / "a.csv.tmp"));
    EXPECT_THROW(write_atomic(d / "no_dir" / "a.csv", "x"), std::runtime_error);
}
