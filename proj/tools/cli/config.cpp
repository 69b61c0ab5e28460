#include "cli/config.hpp"

#include <cmath>
#include <concepts>
#include <fstream>
#include <set>
#include <sstream>

namespace mimo::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string scenes_name(CalibrationScenes s) { return s == CalibrationScenes::noise_only ? "noise-only" : "configured"; }

CalibrationScenes parse_scenes(const std::string& s) {
    if (s == "noise-only") return CalibrationScenes::noise_only;
    if (s == "configured") return CalibrationScenes::configured;
    throw std::invalid_argument("unknown calibration scenes '" + s + "' (expected noise-only or configured)");
}

// Reads one JSON object, tracking consumed keys so leftovers can be rejected.
class Section {
public:
    Section(const json& j, std::string path, const std::string& source) : j_(j), path_(std::move(path)), source_(source) {
        if (!j_.is_object()) fail("", "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(source_ + ": field '" + field(key) + "': " + what);
    }

    std::string field(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) fail(key, "expected a number");
            out = v->get<double>();
        }
    }
    template <std::unsigned_integral U>
    void read(const std::string& key, U& out) {
        if (const json* v = find(key)) out = static_cast<U>(count(key, *v));
    }
    void read(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) fail(key, "expected true or false");
            out = v->get<bool>();
        }
    }
    void read(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail(key, "expected a string");
            out = v->get<std::string>();
        }
    }
    void read(const std::string& key, std::optional<double>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) out.reset();
            else if (v->is_number()) out = v->get<double>();
            else fail(key, "expected a number or null");
        }
    }
    void read_optional_count(const std::string& key, std::optional<std::uint64_t>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) out.reset();
            else out = count(key, *v);
        }
    }
    void read_pair(const std::string& key, double& lo, double& hi) {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                fail(key, "expected [low, high]");
            lo = (*v)[0].get<double>();
            hi = (*v)[1].get<double>();
        }
    }
    template <typename T, typename Parse>
    void read_enum(const std::string& key, T& out, Parse&& parse) {
        std::string s;
        if (!find(key)) return;
        read(key, s);
        try {
            out = parse(s);
        } catch (const std::invalid_argument& e) {
            fail(key, e.what());
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) fail(key, "unknown key");
    }

    const std::string& source() const { return source_; }

private:
    std::uint64_t count(const std::string& key, const json& v) const {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        fail(key, "expected a non-negative integer");
    }

    const json& j_;
    std::string path_;
    const std::string& source_;
    std::set<std::string> seen_;
};

void read_radar(Section s, RadarParams& p) {
    double fc = p.carrier_freq_hz, b = p.bandwidth_hz, t = p.chirp_duration_s, fs = p.sample_rate_hz;
    std::size_t pulses = p.pulses_per_cpi;
    s.read("carrier_freq_hz", fc);
    s.read("bandwidth_hz", b);
    s.read("chirp_duration_s", t);
    s.read("sample_rate_hz", fs);
    s.read("pulses", pulses);
    s.finish();
    try {
        p = RadarParams::make(fc, b, t, fs, pulses);
    } catch (const std::invalid_argument& e) {
        s.fail("", e.what());
    }
}

void read_array(Section s, SparseArraySpec& a) {
    s.read("n_tx", a.n_tx);
    s.read("n_rx", a.n_rx);
    s.read("aperture_tx_wavelengths", a.aperture_tx_wavelengths);
    s.read("aperture_rx_wavelengths", a.aperture_rx_wavelengths);
    s.read_enum("placement", a.placement, parse_placement);
    s.read_optional_count("geometry_seed", a.geometry_seed);
    s.finish();
}

void read_scene(Section s, SceneSpec& sc) {
    s.read("random", sc.random);
    s.read("k", sc.k);
    s.read_pair("range_m", sc.range_lo_m, sc.range_hi_m);
    s.read_pair("aoa_deg", sc.aoa_lo_deg, sc.aoa_hi_deg);
    s.read("aoa_on_grid", sc.aoa_on_grid);
    s.read("range_on_grid", sc.range_on_grid);
    s.read("min_bin_separation", sc.min_bin_separation);
    if (const json* targets = s.find("targets")) {
        if (!targets->is_array()) s.fail("targets", "expected a list of targets");
        sc.fixed.clear();
        for (std::size_t i = 0; i < targets->size(); ++i) {
            Section t((*targets)[i], s.field("targets") + "[" + std::to_string(i) + "]", s.source());
            double range = -1.0, aoa = 0.0, re = 1.0, im = 0.0;
            t.read("range_m", range);
            t.read("aoa_deg", aoa);
            if (const json* g = t.find("gain")) {
                if (!g->is_array() || g->size() != 2 || !(*g)[0].is_number() || !(*g)[1].is_number())
                    t.fail("gain", "expected [re, im]");
                re = (*g)[0].get<double>();
                im = (*g)[1].get<double>();
            }
            t.finish();
            if (!(range > 0.0)) t.fail("range_m", "required, must be > 0");
            if (!(std::abs(aoa) < 90.0)) t.fail("aoa_deg", "must lie in (-90, 90)");
            sc.fixed.push_back({range, aoa * kPi / 180.0, {re, im}});
        }
    }
    s.finish();
    if (sc.random && !sc.fixed.empty()) s.fail("targets", "fixed targets need \"random\": false");
    if (sc.random && sc.k < 1) s.fail("k", "must be >= 1 for random scenes");
}

void read_detection(Section s, TrialConfig& c) {
    s.read("threshold_mult", c.range.threshold_mult);
    s.read("m_of_pulses", c.range.m_of_pulses);
    s.read("m_of_channels", c.range.m_of_channels);
    s.read("bin_tolerance", c.range.bin_tolerance);
    s.read("k_max", c.angle.k_max);
    s.read("residual_tol", c.angle.residual_tol);
    s.read("rel_threshold", c.angle.rel_threshold);
    std::size_t points = c.grid.size();
    double lo = c.grid.sin_lo(), hi = c.grid.sin_hi();
    s.read("grid_points", points);
    s.read_pair("grid_sin", lo, hi);
    s.read("fft_size", c.fft_size);
    s.read("range_tol_m", c.range_tol_m);
    s.read("angle_tol_deg", c.angle_tol_deg);
    s.finish();
    try {
        c.grid = AngleGrid::uniform(lo, hi, points);
    } catch (const std::invalid_argument& e) {
        s.fail("grid_sin", e.what());
    }
}

void read_trial(Section s, RunConfig& r) {
    s.read_enum("method", r.trial.method, parse_method);
    s.read_enum("array", r.trial.array, parse_array_kind);
    s.read("snr_db", r.trial.snr_db);
    s.read("index", r.trial_index);
    s.finish();
}

void read_sweep(Section s, RunConfig& r) {
    if (const json* snrs = s.find("snr_db")) {
        if (!snrs->is_array() || snrs->empty()) s.fail("snr_db", "expected a non-empty list of numbers or nulls");
        r.snr_list.clear();
        for (const json& v : *snrs) {
            if (v.is_null()) r.snr_list.emplace_back(std::nullopt);
            else if (v.is_number()) r.snr_list.emplace_back(v.get<double>());
            else s.fail("snr_db", "entries must be numbers or null (noiseless)");
        }
    }
    if (const json* combos = s.find("combos")) {
        if (!combos->is_array() || combos->empty()) s.fail("combos", "expected a non-empty list");
        r.combos.clear();
        for (std::size_t i = 0; i < combos->size(); ++i) {
            Section c((*combos)[i], s.field("combos") + "[" + std::to_string(i) + "]", s.source());
            Combo combo;
            if (!c.find("method") || !c.find("array")) c.fail("", "needs both \"method\" and \"array\"");
            c.read_enum("method", combo.method, parse_method);
            c.read_enum("array", combo.array, parse_array_kind);
            c.finish();
            r.combos.push_back(combo);
        }
    }
    s.read("n_trials", r.n_trials);
    s.read("seed", r.seed);
    s.read("calibrate", r.calibrate);
    s.read("target_fa_per_trial", r.calibration.target_fa_per_trial);
    s.read("n_cal_trials", r.calibration.n_cal_trials);
    s.read("range_fa_share", r.calibration.range_fa_share);
    s.read_enum("range_calibration_scenes", r.calibration.range_scenes, parse_scenes);
    s.read_enum("angle_calibration_scenes", r.calibration.angle_scenes, parse_scenes);
    s.finish();
}

void read_output(Section s, RunConfig& r) {
    s.read("dir", r.out_dir);
    s.read("plots", r.plots);
    s.finish();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

RunConfig default_run_config() {
    RunConfig r;
    r.trial.snr_db = 20.0;
    for (Method m : {Method::proposed_omp, Method::proposed_somp, Method::classical})
        for (ArrayKind a : {ArrayKind::sparse, ArrayKind::full}) r.combos.push_back({m, a});
    r.snr_list = {0.0, 5.0, 10.0, 15.0, 20.0};
    return r;
}

RunConfig parse_run_config(const std::string& text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string what = e.what();
        const auto colon = what.find(": ", what.find("parse error"));
        throw ConfigError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                          (colon == std::string::npos ? what : what.substr(colon + 2)));
    }

    RunConfig r = default_run_config();
    Section root(doc, "", source_name);
    if (root.find("manifest_version")) {
        const json* cfg = root.find("config");
        if (!cfg) root.fail("config", "manifest has no embedded config");
        return parse_run_config(cfg->dump(), source_name);
    }
    if (const json* v = root.find("radar")) read_radar(Section(*v, "radar", source_name), r.trial.params);
    if (const json* v = root.find("array")) read_array(Section(*v, "array", source_name), r.trial.sparse);
    if (const json* v = root.find("scene")) read_scene(Section(*v, "scene", source_name), r.trial.scene);
    if (const json* v = root.find("detection")) read_detection(Section(*v, "detection", source_name), r.trial);
    if (const json* v = root.find("trial")) read_trial(Section(*v, "trial", source_name), r);
    if (const json* v = root.find("sweep")) read_sweep(Section(*v, "sweep", source_name), r);
    if (const json* v = root.find("output")) read_output(Section(*v, "output", source_name), r);
    root.finish();
    validate(r);
    return r;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

void validate(const RunConfig& r) {
    try {
        r.trial.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    if (r.n_trials < 1) throw ConfigError("invalid config: field 'sweep.n_trials': must be >= 1");
    if (r.calibration.n_cal_trials < 1) throw ConfigError("invalid config: field 'sweep.n_cal_trials': must be >= 1");
    if (!(r.calibration.target_fa_per_trial > 0.0))
        throw ConfigError("invalid config: field 'sweep.target_fa_per_trial': must be > 0");
    if (!(r.calibration.range_fa_share > 0.0) || r.calibration.range_fa_share > 1.0)
        throw ConfigError("invalid config: field 'sweep.range_fa_share': must lie in (0, 1]");
    for (const auto& snr : r.snr_list)
        if (snr && !std::isfinite(*snr)) throw ConfigError("invalid config: field 'sweep.snr_db': entries must be finite");
    if (r.out_dir.empty()) throw ConfigError("invalid config: field 'output.dir': must not be empty");
}

ordered_json to_json(const RunConfig& r) {
    const TrialConfig& t = r.trial;
    ordered_json j;
    j["radar"] = {{"carrier_freq_hz", t.params.carrier_freq_hz},
                  {"bandwidth_hz", t.params.bandwidth_hz},
                  {"chirp_duration_s", t.params.chirp_duration_s},
                  {"sample_rate_hz", t.params.sample_rate_hz},
                  {"pulses", t.params.pulses_per_cpi}};
    j["array"] = {{"n_tx", t.sparse.n_tx},
                  {"n_rx", t.sparse.n_rx},
                  {"aperture_tx_wavelengths", t.sparse.aperture_tx_wavelengths},
                  {"aperture_rx_wavelengths", t.sparse.aperture_rx_wavelengths},
                  {"placement", to_string(t.sparse.placement)},
                  {"geometry_seed", t.sparse.geometry_seed ? ordered_json(*t.sparse.geometry_seed) : ordered_json()}};
    ordered_json targets = ordered_json::array();
    for (const Target& x : t.scene.fixed)
        targets.push_back({{"range_m", x.range_m}, {"aoa_deg", x.aoa_rad * 180.0 / kPi}, {"gain", {x.gain.real(), x.gain.imag()}}});
    j["scene"] = {{"random", t.scene.random},
                  {"k", t.scene.k},
                  {"range_m", {t.scene.range_lo_m, t.scene.range_hi_m}},
                  {"aoa_deg", {t.scene.aoa_lo_deg, t.scene.aoa_hi_deg}},
                  {"aoa_on_grid", t.scene.aoa_on_grid},
                  {"range_on_grid", t.scene.range_on_grid},
                  {"min_bin_separation", t.scene.min_bin_separation},
                  {"targets", targets}};
    j["detection"] = {{"threshold_mult", t.range.threshold_mult},
                      {"m_of_pulses", t.range.m_of_pulses},
                      {"m_of_channels", t.range.m_of_channels},
                      {"bin_tolerance", t.range.bin_tolerance},
                      {"k_max", t.angle.k_max},
                      {"residual_tol", t.angle.residual_tol},
                      {"rel_threshold", t.angle.rel_threshold},
                      {"grid_points", t.grid.size()},
                      {"grid_sin", {t.grid.sin_lo(), t.grid.sin_hi()}},
                      {"fft_size", t.fft_size},
                      {"range_tol_m", t.range_tol_m},
                      {"angle_tol_deg", t.angle_tol_deg}};
    j["trial"] = {{"method", to_string(t.method)},
                  {"array", to_string(t.array)},
                  {"snr_db", t.snr_db ? ordered_json(*t.snr_db) : ordered_json()},
                  {"index", r.trial_index}};
    ordered_json snrs = ordered_json::array();
    for (const auto& s : r.snr_list) snrs.push_back(s ? ordered_json(*s) : ordered_json());
    ordered_json combos = ordered_json::array();
    for (const Combo& c : r.combos) combos.push_back({{"method", to_string(c.method)}, {"array", to_string(c.array)}});
    j["sweep"] = {{"snr_db", snrs},
                  {"combos", combos},
                  {"n_trials", r.n_trials},
                  {"seed", r.seed},
                  {"calibrate", r.calibrate},
                  {"target_fa_per_trial", r.calibration.target_fa_per_trial},
                  {"n_cal_trials", r.calibration.n_cal_trials},
                  {"range_fa_share", r.calibration.range_fa_share},
                  {"range_calibration_scenes", scenes_name(r.calibration.range_scenes)},
                  {"angle_calibration_scenes", scenes_name(r.calibration.angle_scenes)}};
    j["output"] = {{"dir", r.out_dir}, {"plots", r.plots}};
    return j;
}

}  // namespace mimo::cli
