#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "cli/svg.hpp"
#include "mimo/classical.hpp"
#include "mimo/seed.hpp"

namespace mimo::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v, int digits = 6) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string snr_text(const std::optional<double>& snr) { return snr ? fmt(*snr, 2) : "inf"; }

fs::path prepare_dir(const RunConfig& config) {
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    return dir;
}

std::string seed_rule() {
    return "splitmix64 counter split: trial seed = derive(master, [4, snr_index, trial]); calibration seed = "
           "derive(master, [5, snr_index]); per trial geometry/scene/noise = derive(trial, [1|2|3])";
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& config, ordered_json extra) {
    ordered_json m;
    m["manifest_version"] = 1;
    m["command"] = command;
    m["config"] = to_json(config);
    m["seeds"] = {{"master", config.seed}, {"derivation", seed_rule()}};
    for (auto& [key, value] : extra.items()) m[key] = value;
    write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

std::string calibration_header() {
    return "snr_db,method,array,range_threshold_mult,angle_rel_threshold,range_stage_fa,achieved_fa,range_converged,"
           "angle_converged,achievable_bound\n";
}

std::string calibration_line(const std::optional<double>& snr, Method method, ArrayKind array,
                             const CalibrationResult& c) {
    std::ostringstream o;
    o << snr_text(snr) << ',' << to_string(method) << ',' << to_string(array) << ',' << fmt(c.range_threshold_mult)
      << ',' << fmt(c.angle_rel_threshold) << ',' << fmt(c.range_stage_fa) << ',' << fmt(c.achieved_fa) << ','
      << (c.range_converged ? 1 : 0) << ',' << (c.angle_converged ? 1 : 0) << ','
      << (c.achievable_bound ? fmt(*c.achievable_bound) : "") << '\n';
    return o.str();
}

TrialConfig with_combo(const RunConfig& config, Combo combo) {
    TrialConfig t = config.trial;
    t.method = combo.method;
    t.array = combo.array;
    return t;
}

void sweep_plots(const fs::path& dir, const std::vector<MetricsRow>& rows, const RunConfig& config) {
    struct Metric {
        const char* file;
        const char* title;
        double MetricsRow::*field;
    };
    const Metric metrics[] = {{"hit_rate.svg", "Hit rate", &MetricsRow::hit_rate},
                              {"fa_rate.svg", "False alarms per trial", &MetricsRow::false_alarm_rate},
                              {"range_rmse.svg", "Range RMSE (m)", &MetricsRow::range_rmse_m},
                              {"angle_rmse.svg", "Angle RMSE (deg)", &MetricsRow::angle_rmse_deg}};
    for (const Metric& m : metrics) {
        std::vector<Series> series;
        for (const Combo& c : config.combos) {
            Series s{to_string(c.method) + " / " + to_string(c.array), {}, {}};
            for (const MetricsRow& r : rows)
                if (r.method == c.method && r.array == c.array && r.snr_db) {
                    s.x.push_back(*r.snr_db);
                    s.y.push_back(r.*m.field);
                }
            series.push_back(std::move(s));
        }
        write_atomic(dir / m.file, line_chart(m.title, "SNR (dB)", m.title, series));
    }
}

std::string spectrum_csv(const std::vector<std::vector<double>>& columns, const std::vector<std::string>& names,
                         const RadarParams& params) {
    std::ostringstream o;
    o << "bin,range_m";
    for (const auto& n : names) o << ',' << n;
    o << '\n';
    const std::size_t bins = columns.empty() ? 0 : columns.front().size();
    for (std::size_t l = 0; l < bins; ++l) {
        o << l << ',' << fmt(bin_to_range(l, params));
        for (const auto& col : columns) o << ',' << fmt(col[l]);
        o << '\n';
    }
    return o.str();
}

}  // namespace

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void apply(const Overrides& overrides, RunConfig& config) {
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.plots) config.plots = true;
    validate(config);
}

void write_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        f << contents;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

void cmd_sweep(const RunConfig& config, std::size_t jobs, std::ostream& log) {
    const fs::path dir = prepare_dir(config);
    std::vector<MetricsRow> rows;
    std::string metrics = "snr_db,method,array,hit_rate,fa_rate,range_rmse_m,angle_rmse_deg,n_trials\n";
    std::string calibration = calibration_header();
    ordered_json calibration_seeds = ordered_json::array();
    for (std::size_t s = 0; s < config.snr_list.size(); ++s)
        calibration_seeds.push_back(derive_seed(config.seed, {stream::calibration, s}));

    MonteCarloOptions mc;
    mc.n_trials = config.n_trials;
    mc.master_seed = config.seed;
    mc.calibrate = config.calibrate;
    mc.calibration = config.calibration;
    mc.jobs = jobs;
    for (const Combo& combo : config.combos) {
        log << "sweep " << to_string(combo.method) << " / " << to_string(combo.array) << std::endl;
        for (const SweepPoint& p : monte_carlo(with_combo(config, combo), config.snr_list, mc)) {
            const MetricsRow& r = p.row;
            metrics += snr_text(r.snr_db) + ',' + to_string(r.method) + ',' + to_string(r.array) + ',' +
                       fmt(r.hit_rate) + ',' + fmt(r.false_alarm_rate) + ',' + fmt(r.range_rmse_m) + ',' +
                       fmt(r.angle_rmse_deg) + ',' + std::to_string(r.n_trials) + '\n';
            if (p.calibration) calibration += calibration_line(r.snr_db, r.method, r.array, *p.calibration);
            log << "  snr " << snr_text(r.snr_db) << "  hit " << fmt(r.hit_rate, 3) << "  fa "
                << fmt(r.false_alarm_rate, 3) << "  range_rmse " << fmt(r.range_rmse_m, 3) << std::endl;
            rows.push_back(r);
        }
    }
    write_atomic(dir / "metrics.csv", metrics);
    if (config.calibrate) write_atomic(dir / "calibration.csv", calibration);
    write_manifest(dir, "sweep", config, {{"calibration_seeds", calibration_seeds}});
    if (config.plots) sweep_plots(dir, rows, config);
}

void cmd_close_targets(const RunConfig& config, std::ostream& log) {
    const fs::path dir = prepare_dir(config);
    const TrialConfig& t = config.trial;
    const TargetScene scene = close_target_scene(derive_seed(config.seed, {stream::scene}));
    const double sigma = t.snr_db ? noise_sigma_from_snr(*t.snr_db) : 0.0;
    const std::uint64_t noise_seed = derive_seed(config.seed, {stream::noise});

    TrialConfig sparse_cfg = t;
    sparse_cfg.array = ArrayKind::sparse;
    const ArrayGeometry sparse = make_geometry(sparse_cfg, config.seed);
    const SpectrumPlane proposed = dft_all(synthesize_cube(t.params, sparse, scene, sigma, noise_seed));
    const ArrayGeometry full = full_array_geometry(t.params).array;
    const SpectrumPlane classical = dft_all(synthesize_cube(t.params, full, scene, sigma, noise_seed));

    const std::vector<double> integrated = integrated_spectrum(classical);
    write_atomic(dir / "classical_integrated.csv", spectrum_csv({integrated}, {"magnitude"}, t.params));

    std::vector<std::string> names;
    for (std::size_t c = 0; c < proposed.n_channels(); ++c) names.push_back("channel_" + std::to_string(c));
    const std::size_t n_pulses = std::min<std::size_t>(3, proposed.n_pulses());
    for (std::size_t p = 0; p < n_pulses; ++p) {
        std::vector<std::vector<double>> cols;
        for (std::size_t c = 0; c < proposed.n_channels(); ++c) cols.push_back(proposed.magnitudes(c, p));
        write_atomic(dir / ("proposed_pulse_" + std::to_string(p + 1) + ".csv"), spectrum_csv(cols, names, t.params));
    }

    const RangeDetectionSet prop = detect_ranges(proposed, t.range);
    const RangeDetectionSet cls = classical_range_detect(classical, t.range.threshold_mult);
    std::string det = "pipeline,bin,range_m,support\n";
    for (const ConfirmedBin& b : prop.confirmed)
        det += "proposed," + std::to_string(b.bin) + ',' + fmt(b.range_m) + ',' + std::to_string(b.support_count) + '\n';
    for (const ConfirmedBin& b : cls.confirmed)
        det += "classical," + std::to_string(b.bin) + ',' + fmt(b.range_m) + ',' + std::to_string(b.support_count) + '\n';
    write_atomic(dir / "detections.csv", det);

    std::string truth = "range_m,aoa_deg,gain_re,gain_im\n";
    for (const Target& x : scene.targets)
        truth += fmt(x.range_m) + ',' + fmt(x.aoa_rad * 180.0 / kPi) + ',' + fmt(x.gain.real()) + ',' +
                 fmt(x.gain.imag()) + '\n';
    write_atomic(dir / "truth.csv", truth);
    write_manifest(dir, "close-targets", config,
                   {{"scene_seed", derive_seed(config.seed, {stream::scene})}, {"noise_seed", noise_seed}});

    if (config.plots) {
        auto bins_series = [&](const std::string& label, const std::vector<double>& mag) {
            Series s{label, {}, {}};
            const double top = *std::max_element(mag.begin(), mag.end());
            for (std::size_t l = 20; l < 48 && l < mag.size(); ++l) {
                s.x.push_back(bin_to_range(l, t.params));
                s.y.push_back(top > 0.0 ? mag[l] / top : 0.0);
            }
            return s;
        };
        std::vector<Series> series{bins_series("classical integrated", integrated)};
        for (std::size_t p = 0; p < n_pulses; ++p)
            series.push_back(bins_series("proposed pulse " + std::to_string(p + 1), proposed.magnitudes(0, p)));
        write_atomic(dir / "close_targets.svg", line_chart("Close targets", "range (m)", "normalized magnitude", series));
    }

    log << "proposed bins:";
    for (std::size_t b : prop.bins()) log << ' ' << b;
    log << "\nclassical bins:";
    for (std::size_t b : cls.bins()) log << ' ' << b;
    log << '\n';
}

void cmd_single(const RunConfig& config, std::ostream& out) {
    const fs::path dir = prepare_dir(config);
    const std::uint64_t seed = trial_seed(config.seed, 0, config.trial_index);
    const TrialOutcome o = run_trial(config.trial, seed);

    std::vector<std::string> truth_status(o.truth.size(), "miss");
    std::vector<std::string> est_status(o.estimates.size(), "false-alarm");
    std::vector<long> est_match(o.estimates.size(), -1), truth_match(o.truth.size(), -1);
    for (auto [e, t] : o.match.hits) {
        truth_status[t] = est_status[e] = "hit";
        est_match[e] = static_cast<long>(t);
        truth_match[t] = static_cast<long>(e);
    }

    std::string csv = "kind,index,range_m,aoa_deg,status,matched\n";
    std::ostringstream table;
    table << std::left << std::setw(10) << "kind" << std::setw(7) << "index" << std::right << std::setw(12)
          << "range_m" << std::setw(12) << "aoa_deg" << "  " << std::left << std::setw(12) << "status" << "matched\n";
    auto row = [&](const std::string& kind, std::size_t i, double r, double a, const std::string& status, long m) {
        const std::string ms = m < 0 ? "" : std::to_string(m);
        csv += kind + ',' + std::to_string(i) + ',' + fmt(r) + ',' + fmt(a) + ',' + status + ',' + ms + '\n';
        table << std::left << std::setw(10) << kind << std::setw(7) << i << std::right << std::setw(12) << fmt(r, 3)
              << std::setw(12) << fmt(a, 3) << "  " << std::left << std::setw(12) << status << ms << '\n';
    };
    for (std::size_t i = 0; i < o.truth.size(); ++i)
        row("truth", i, o.truth.targets[i].range_m, o.truth.targets[i].aoa_rad * 180.0 / kPi, truth_status[i],
            truth_match[i]);
    for (std::size_t i = 0; i < o.estimates.size(); ++i)
        row("estimate", i, o.estimates[i].range_m, o.estimates[i].aoa_deg, est_status[i], est_match[i]);

    out << "method " << to_string(config.trial.method) << ", array " << to_string(config.trial.array) << ", snr "
        << snr_text(config.trial.snr_db) << " dB, trial " << config.trial_index << '\n'
        << table.str() << "hits " << o.match.hits.size() << ", false alarms " << o.match.false_alarms.size()
        << ", misses " << o.match.misses.size() << '\n';
    write_atomic(dir / "single.csv", csv);
    write_manifest(dir, "single", config, {{"trial_seed", seed}});
}

void cmd_calibrate(const RunConfig& config, std::size_t jobs, std::ostream& log) {
    const fs::path dir = prepare_dir(config);
    std::string csv = calibration_header();
    ordered_json seeds = ordered_json::array();
    const std::vector<std::optional<double>> snrs{config.trial.snr_db};
    for (const Combo& combo : config.combos)
        for (std::size_t s = 0; s < snrs.size(); ++s) {
            TrialConfig t = with_combo(config, combo);
            t.snr_db = snrs[s];
            CalibrationOptions co = config.calibration;
            co.seed = derive_seed(config.seed, {stream::calibration, s});
            co.jobs = jobs;
            const CalibrationResult c = calibrate_threshold(t, co);
            csv += calibration_line(t.snr_db, t.method, t.array, c);
            log << to_string(t.method) << " / " << to_string(t.array) << ": mult " << fmt(c.range_threshold_mult, 3)
                << ", rel " << fmt(c.angle_rel_threshold, 3) << ", fa " << fmt(c.achieved_fa, 3) << std::endl;
            if (s == 0 && seeds.empty()) seeds.push_back(co.seed);
        }
    write_atomic(dir / "calibration.csv", csv);
    write_manifest(dir, "calibrate", config, {{"calibration_seeds", seeds}});
}

int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = load_run_config(config_path);
        apply(overrides, config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    const std::size_t jobs = overrides.jobs.value_or(default_jobs());
    try {
        if (command == "sweep") cmd_sweep(config, jobs, err);
        else if (command == "close-targets") cmd_close_targets(config, err);
        else if (command == "single") cmd_single(config, out);
        else if (command == "calibrate") cmd_calibrate(config, jobs, err);
        else {
            err << "unknown command '" << command << "'\n";
            return 2;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace mimo::cli
