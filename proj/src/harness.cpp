#include "mimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mimo/seed.hpp"

namespace mimo {

std::string to_string(ArrayKind kind) { return kind == ArrayKind::sparse ? "sparse" : "full"; }

std::string to_string(Method method) {
    switch (method) {
        case Method::proposed_omp: return "proposed-omp";
        case Method::proposed_somp: return "proposed-somp";
        case Method::classical: return "classical";
    }
    return "unknown";
}

std::string to_string(Placement placement) {
    return placement == Placement::uniform_random ? "uniform-random" : "uniform-spaced";
}

ArrayKind parse_array_kind(const std::string& s) {
    if (s == "sparse") return ArrayKind::sparse;
    if (s == "full") return ArrayKind::full;
    throw std::invalid_argument("unknown array kind '" + s + "' (expected sparse or full)");
}

Method parse_method(const std::string& s) {
    if (s == "proposed-omp") return Method::proposed_omp;
    if (s == "proposed-somp") return Method::proposed_somp;
    if (s == "classical") return Method::classical;
    throw std::invalid_argument("unknown method '" + s + "' (expected proposed-omp, proposed-somp or classical)");
}

Placement parse_placement(const std::string& s) {
    if (s == "uniform-random") return Placement::uniform_random;
    if (s == "uniform-spaced") return Placement::uniform_spaced;
    throw std::invalid_argument("unknown placement '" + s + "' (expected uniform-random or uniform-spaced)");
}

void TrialConfig::validate() const {
    params.validate();
    grid.validate();
    if (scene.random) {
        if (scene.k < 1) throw std::invalid_argument("scene.k must be >= 1 for random scenes");
        if (!(scene.range_lo_m <= scene.range_hi_m) || !(scene.range_lo_m > 0.0))
            throw std::invalid_argument("scene range bounds must satisfy 0 < lo <= hi");
        if (!(scene.aoa_lo_deg <= scene.aoa_hi_deg) || scene.aoa_lo_deg <= -90.0 || scene.aoa_hi_deg >= 90.0)
            throw std::invalid_argument("scene AOA bounds must satisfy -90 < lo <= hi < 90");
    }
    if (snr_db && !std::isfinite(*snr_db)) throw std::invalid_argument("snr_db must be finite");
    if (!(range.threshold_mult > 0.0)) throw std::invalid_argument("threshold_mult must be > 0");
    if (!(angle.rel_threshold > 0.0) || angle.rel_threshold > 1.0)
        throw std::invalid_argument("rel_threshold must be in (0, 1]");
    if (angle.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (fft_size < 20) throw std::invalid_argument("fft_size must be >= 20");
    if (!(range_tol_m > 0.0) || !(angle_tol_deg > 0.0)) throw std::invalid_argument("match tolerances must be > 0");
    if (array == ArrayKind::sparse && (sparse.n_tx < 1 || sparse.n_rx < 1 || !(sparse.aperture_tx_wavelengths > 0.0) ||
                                       !(sparse.aperture_rx_wavelengths > 0.0)))
        throw std::invalid_argument("sparse array needs >= 1 element per side and positive apertures");
}

ArrayGeometry make_geometry(const TrialConfig& config, std::uint64_t seed) {
    if (config.array == ArrayKind::full) return full_array_geometry(config.params).array;
    const double lambda = config.params.wavelength_m();
    const std::uint64_t gs = config.sparse.geometry_seed ? *config.sparse.geometry_seed
                                                         : derive_seed(seed, {stream::geometry});
    return random_sparse_geometry(config.sparse.n_tx, config.sparse.n_rx, config.sparse.aperture_tx_wavelengths * lambda,
                                  config.sparse.aperture_rx_wavelengths * lambda, gs, config.sparse.placement);
}

TargetScene random_scene(const SceneSpec& spec, const AngleGrid& grid, const RadarParams& params, std::uint64_t seed) {
    TargetScene scene;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * unit(rng); };

    std::vector<std::size_t> on_grid;
    if (spec.aoa_on_grid) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double deg = grid.aoa_deg(g);
            if (deg >= spec.aoa_lo_deg && deg <= spec.aoa_hi_deg) on_grid.push_back(g);
        }
        if (on_grid.empty()) throw std::invalid_argument("no angle-grid point inside the AOA bounds");
    }

    std::vector<std::size_t> bins;
    if (spec.range_on_grid) {
        std::size_t lo = range_to_nearest_bin(spec.range_lo_m, params);
        if (bin_to_range(lo, params) < spec.range_lo_m) ++lo;
        std::size_t hi = range_to_nearest_bin(spec.range_hi_m, params);
        if (bin_to_range(hi, params) > spec.range_hi_m) --hi;
        if (lo == 0) lo = 1;
        std::vector<std::size_t> free;
        for (std::size_t b = lo; b <= hi; ++b) free.push_back(b);
        for (std::size_t k = 0; k < spec.k; ++k) {
            if (free.empty()) throw std::invalid_argument("range interval too short for the requested bin separation");
            std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
            const std::size_t b = free[pick(rng)];
            bins.push_back(b);
            std::erase_if(free, [&](std::size_t f) { return (f > b ? f - b : b - f) < spec.min_bin_separation; });
        }
    }

    for (std::size_t k = 0; k < spec.k; ++k) {
        Target t;
        t.range_m = spec.range_on_grid ? bin_to_range(bins[k], params) : draw(spec.range_lo_m, spec.range_hi_m);
        if (spec.aoa_on_grid) {
            std::uniform_int_distribution<std::size_t> pick(0, on_grid.size() - 1);
            t.aoa_rad = grid.aoa_rad(on_grid[pick(rng)]);
        } else {
            t.aoa_rad = draw(spec.aoa_lo_deg, spec.aoa_hi_deg) * kPi / 180.0;
        }
        t.gain = std::polar(1.0, 2.0 * kPi * unit(rng));
        scene.targets.push_back(t);
    }
    return scene;
}

TargetScene close_target_scene(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    TargetScene scene;
    for (double r : {20.6, 20.0, 19.4}) scene.targets.push_back({r, 0.0, std::polar(1.0, phase(rng))});
    return scene;
}

MatchResult match_hits(const std::vector<Estimate>& estimates, const TargetScene& truth, double range_tol_m,
                       double angle_tol_deg) {
    if (!(range_tol_m > 0.0) || !(angle_tol_deg > 0.0)) throw std::invalid_argument("match tolerances must be > 0");
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < estimates.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const double dr = std::abs(estimates[i].range_m - truth.targets[j].range_m);
            const double da = std::abs(estimates[i].aoa_deg - truth.targets[j].aoa_rad * 180.0 / kPi);
            if (dr <= range_tol_m && da <= angle_tol_deg)
                pairs.emplace_back(std::max(dr / range_tol_m, da / angle_tol_deg), i, j);
        }
    std::sort(pairs.begin(), pairs.end());

    MatchResult out;
    std::vector<bool> est_used(estimates.size(), false), truth_used(truth.size(), false);
    for (const auto& [d, i, j] : pairs) {
        if (est_used[i] || truth_used[j]) continue;
        est_used[i] = truth_used[j] = true;
        out.hits.emplace_back(i, j);
    }
    for (std::size_t i = 0; i < estimates.size(); ++i)
        if (!est_used[i]) out.false_alarms.push_back(i);
    for (std::size_t j = 0; j < truth.size(); ++j)
        if (!truth_used[j]) out.misses.push_back(j);
    return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct TrialInputs {
    ArrayGeometry geometry;
    TargetScene truth;
    SpectrumPlane plane;
};

TrialInputs prepare(const TrialConfig& config, std::uint64_t seed) {
    ArrayGeometry geometry = make_geometry(config, seed);
    TargetScene truth = config.scene.random
                            ? random_scene(config.scene, config.grid, config.params, derive_seed(seed, {stream::scene}))
                            : TargetScene{config.scene.fixed};
    const double sigma = config.snr_db ? noise_sigma_from_snr(*config.snr_db) : 0.0;
    SpectrumPlane plane = dft_all(synthesize_cube(config.params, geometry, truth, sigma, derive_seed(seed, {stream::noise})));
    return {std::move(geometry), std::move(truth), std::move(plane)};
}

// Local maxima of one spectrum above keep_mult * floor. Any multiplier >= keep_mult then selects
// exactly what detect_peaks would.
struct RowPeaks {
    double floor = 0.0;
    std::vector<std::pair<std::size_t, double>> peaks;
};

RowPeaks row_peaks(std::span<const double> magnitudes, double keep_mult) {
    RowPeaks r;
    r.floor = noise_floor(magnitudes);
    for (std::size_t l : local_maxima(magnitudes))
        if (magnitudes[l] > keep_mult * r.floor) r.peaks.emplace_back(l, magnitudes[l]);
    return r;
}

std::vector<std::size_t> select_peaks(const RowPeaks& r, double mult) {
    std::vector<std::size_t> out;
    for (const auto& [l, v] : r.peaks)
        if (v > mult * r.floor) out.push_back(l);
    return out;
}

// Pre-threshold range statistics: one row per (channel, pulse) for the proposed method, a single
// integrated row for the classical one.
struct RangeStatistics {
    std::vector<RowPeaks> rows;
    std::size_t channels = 0;
    std::size_t pulses = 0;
};

RangeStatistics range_statistics(const SpectrumPlane& plane, Method method, double keep_mult) {
    RangeStatistics st;
    st.channels = plane.n_channels();
    st.pulses = plane.n_pulses();
    if (method == Method::classical) {
        st.rows.push_back(row_peaks(integrated_spectrum(plane), keep_mult));
        return st;
    }
    st.rows.reserve(st.channels * st.pulses);
    for (std::size_t ch = 0; ch < st.channels; ++ch)
        for (std::size_t p = 0; p < st.pulses; ++p) st.rows.push_back(row_peaks(plane.magnitudes(ch, p), keep_mult));
    return st;
}

RangeDetectionSet range_stage(const RangeStatistics& st, const TrialConfig& config, const ArrayGeometry& geometry) {
    const double mult = config.range.threshold_mult;
    if (config.method == Method::classical) {
        RangeDetectionSet out;
        for (std::size_t l : select_peaks(st.rows.front(), mult)) {
            out.supported_bins.push_back(l);
            out.confirmed.push_back({l, bin_to_range(l, config.params), st.channels});
        }
        return out;
    }
    std::vector<std::vector<std::vector<std::size_t>>> detections(st.channels);
    for (std::size_t ch = 0; ch < st.channels; ++ch) {
        detections[ch].resize(st.pulses);
        for (std::size_t p = 0; p < st.pulses; ++p) detections[ch][p] = select_peaks(st.rows[ch * st.pulses + p], mult);
    }
    const std::size_t mp = config.range.m_of_pulses ? config.range.m_of_pulses : default_m_of_pulses(config.params);
    const std::size_t mc = config.range.m_of_channels ? config.range.m_of_channels : default_m_of_channels(geometry);
    return binary_integrate(detections, mp, mc, config.range.bin_tolerance, config.params);
}

// Every angle candidate of one confirmed bin with its score; thresholding keeps score >= rel * top.
struct BinCandidates {
    ConfirmedBin bin;
    std::vector<AngleEstimate> entries;
    double top = 0.0;
};

std::vector<BinCandidates> angle_candidates(const SpectrumPlane& plane, const RangeDetectionSet& ranges,
                                            const TrialConfig& config, const ArrayGeometry& geometry) {
    std::vector<BinCandidates> out;
    if (ranges.confirmed.empty()) return out;
    if (config.method == Method::classical) {
        std::optional<FullArrayGeometry> ula;
        if (config.array == ArrayKind::full) ula = full_array_geometry(config.params);
        for (const ConfirmedBin& cb : ranges.confirmed) {
            const BinMeasurement meas = extract_bin_measurements(plane, cb.bin);
            const std::vector<double> spectrum =
                ula ? spatial_spectrum(ula_snapshot(meas, *ula), config.fft_size)
                    : nonuniform_spatial_spectrum(meas.Y.rowwise().sum(), geometry, config.params, config.fft_size);
            BinCandidates bc{cb, {}, *std::max_element(spectrum.begin(), spectrum.end())};
            if (bc.top > 0.0)
                for (std::size_t i : local_maxima(spectrum))
                    bc.entries.push_back(
                        {i, std::asin(spatial_bin_to_sin(i, config.fft_size)) * 180.0 / kPi, spectrum[i]});
            std::sort(bc.entries.begin(), bc.entries.end(),
                      [](const AngleEstimate& a, const AngleEstimate& b) { return a.aoa_deg < b.aoa_deg; });
            out.push_back(std::move(bc));
        }
        return out;
    }
    const SteeringDictionary dict = build_dictionary(config.grid, geometry, config.params);
    const Solver solver = config.method == Method::proposed_omp ? Solver::omp : Solver::somp;
    for (const ConfirmedBin& cb : ranges.confirmed) {
        const PursuitResult pr = pursue_bin(extract_bin_measurements(plane, cb.bin), dict, solver, config.angle);
        const std::vector<double> scores = support_scores(pr, solver);
        BinCandidates bc{cb, {}, 0.0};
        for (std::size_t i = 0; i < scores.size(); ++i) {
            bc.top = std::max(bc.top, scores[i]);
            bc.entries.push_back({pr.support[i], config.grid.aoa_deg(pr.support[i]), scores[i]});
        }
        std::sort(bc.entries.begin(), bc.entries.end(),
                  [](const AngleEstimate& a, const AngleEstimate& b) { return a.grid_index < b.grid_index; });
        out.push_back(std::move(bc));
    }
    return out;
}

std::vector<Estimate> angle_stage(const std::vector<BinCandidates>& bins, double rel_threshold) {
    std::vector<Estimate> out;
    for (const BinCandidates& bc : bins)
        for (const AngleEstimate& e : bc.entries)
            if (e.score >= rel_threshold * bc.top) out.push_back({bc.bin.range_m, e.aoa_deg, bc.bin.bin});
    return out;
}

std::size_t range_false_alarms(const RangeDetectionSet& ranges, const TargetScene& truth, double range_tol_m) {
    std::size_t n = 0;
    for (const ConfirmedBin& cb : ranges.confirmed) {
        const bool near_target = std::any_of(truth.targets.begin(), truth.targets.end(), [&](const Target& t) {
            return std::abs(t.range_m - cb.range_m) <= range_tol_m;
        });
        if (!near_target) ++n;
    }
    return n;
}

}  // namespace

TrialOutcome run_trial(const TrialConfig& config, std::uint64_t seed) {
    TrialInputs in = prepare(config, seed);
    TrialOutcome out;
    out.ranges = range_stage(range_statistics(in.plane, config.method, config.range.threshold_mult), config,
                             in.geometry);
    out.estimates = angle_stage(angle_candidates(in.plane, out.ranges, config, in.geometry), config.angle.rel_threshold);
    out.truth = std::move(in.truth);
    out.match = match_hits(out.estimates, out.truth, config.range_tol_m, config.angle_tol_deg);
    return out;
}

std::vector<TrialOutcome> run_trials(const TrialConfig& config, std::size_t n,
                                     const std::function<std::uint64_t(std::size_t)>& seed_of, std::size_t jobs) {
    std::vector<TrialOutcome> results(n);
    parallel_for(n, jobs, [&](std::size_t i) { results[i] = run_trial(config, seed_of(i)); });
    return results;
}

double false_alarm_rate(const TrialConfig& config, std::size_t n_trials, std::uint64_t seed, bool noise_only,
                        std::size_t jobs) {
    if (n_trials == 0) throw std::invalid_argument("n_trials must be >= 1");
    TrialConfig cfg = config;
    if (noise_only) {
        cfg.scene.random = false;
        cfg.scene.fixed.clear();
    }
    const auto outcomes = run_trials(
        cfg, n_trials, [seed](std::size_t i) { return derive_seed(seed, {stream::calibration, i}); }, jobs);
    std::size_t fa = 0;
    for (const auto& o : outcomes) fa += o.match.false_alarms.size();
    return static_cast<double>(fa) / static_cast<double>(n_trials);
}

namespace {

struct BisectionResult {
    double value;
    double fa;
    bool converged;
    std::optional<double> bound;
};

// fa(x) is non-increasing in x. Returns the smallest probed x whose FA/trial is within the band,
// preferring the sensitive end when the whole bracket already meets the target.
template <typename Fa>
BisectionResult bisect(Fa&& fa, double lo, double hi, double target, std::size_t iterations, bool geometric) {
    const double upper = 1.2 * target;
    const double lower = 0.8 * target;
    const double f_hi = fa(hi);
    if (f_hi > upper) return {hi, f_hi, false, f_hi};
    const double f_lo = fa(lo);
    if (f_lo <= upper) return {lo, f_lo, true, std::nullopt};

    double best = hi, best_fa = f_hi;
    for (std::size_t it = 0; it < iterations; ++it) {
        const double mid = geometric ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        const double f = fa(mid);
        if (f <= upper) {
            hi = mid;
            best = mid;
            best_fa = f;
            if (f >= lower) return {mid, f, true, std::nullopt};
        } else {
            lo = mid;
        }
    }
    return {best, best_fa, true, std::nullopt};
}

TrialConfig scenes_for(const TrialConfig& config, CalibrationScenes scenes) {
    TrialConfig c = config;
    if (scenes == CalibrationScenes::noise_only) {
        c.scene.random = false;
        c.scene.fixed.clear();
    }
    return c;
}

}  // namespace

CalibrationResult calibrate_threshold(const TrialConfig& config, const CalibrationOptions& options) {
    if (!(options.target_fa_per_trial > 0.0)) throw std::invalid_argument("target_fa_per_trial must be > 0");
    if (options.n_cal_trials == 0) throw std::invalid_argument("n_cal_trials must be >= 1");
    if (!(options.range_fa_share > 0.0) || options.range_fa_share > 1.0)
        throw std::invalid_argument("range_fa_share must be in (0, 1]");
    if (!(options.range_mult_lo > 0.0) || !(options.range_mult_lo < options.range_mult_hi))
        throw std::invalid_argument("range multiplier bracket must satisfy 0 < lo < hi");
    if (!(options.angle_rel_lo > 0.0) || !(options.angle_rel_lo < options.angle_rel_hi) || options.angle_rel_hi > 1.0)
        throw std::invalid_argument("rel_threshold bracket must satisfy 0 < lo < hi <= 1");

    const std::size_t n = options.n_cal_trials;
    const double n_d = static_cast<double>(n);
    auto seed_of = [&](std::size_t i) { return derive_seed(options.seed, {stream::calibration, i}); };
    CalibrationResult out;

    // Range stage: statistics are computed once and re-thresholded for every probed multiplier.
    const TrialConfig range_cfg = scenes_for(config, options.range_scenes);
    std::vector<RangeStatistics> stats(n);
    std::vector<TargetScene> range_truth(n);
    std::vector<ArrayGeometry> range_geometry(n);
    parallel_for(n, options.jobs, [&](std::size_t i) {
        TrialInputs in = prepare(range_cfg, seed_of(i));
        stats[i] = range_statistics(in.plane, range_cfg.method, options.range_mult_lo);
        range_truth[i] = std::move(in.truth);
        range_geometry[i] = std::move(in.geometry);
    });
    auto range_fa = [&](double mult) {
        TrialConfig c = range_cfg;
        c.range.threshold_mult = mult;
        std::size_t fa = 0;
        for (std::size_t i = 0; i < n; ++i)
            fa += range_false_alarms(range_stage(stats[i], c, range_geometry[i]), range_truth[i], c.range_tol_m);
        return static_cast<double>(fa) / n_d;
    };
    const auto r = bisect(range_fa, options.range_mult_lo, options.range_mult_hi,
                          options.range_fa_share * options.target_fa_per_trial, options.max_iterations, true);
    stats.clear();
    out.range_threshold_mult = r.value;
    out.range_stage_fa = r.fa;
    out.range_converged = r.converged;
    if (r.bound) out.achievable_bound = r.bound;

    // Angle stage: pre-threshold candidates at the calibrated multiplier, re-thresholded per probe.
    TrialConfig angle_cfg = scenes_for(config, options.angle_scenes);
    angle_cfg.range.threshold_mult = r.value;
    std::vector<std::vector<BinCandidates>> candidates(n);
    std::vector<TargetScene> angle_truth(n);
    parallel_for(n, options.jobs, [&](std::size_t i) {
        TrialInputs in = prepare(angle_cfg, seed_of(i));
        const RangeDetectionSet ranges =
            range_stage(range_statistics(in.plane, angle_cfg.method, r.value), angle_cfg, in.geometry);
        candidates[i] = angle_candidates(in.plane, ranges, angle_cfg, in.geometry);
        angle_truth[i] = std::move(in.truth);
    });
    auto angle_fa = [&](double rel) {
        std::size_t fa = 0;
        for (std::size_t i = 0; i < n; ++i)
            fa += match_hits(angle_stage(candidates[i], rel), angle_truth[i], angle_cfg.range_tol_m,
                             angle_cfg.angle_tol_deg)
                      .false_alarms.size();
        return static_cast<double>(fa) / n_d;
    };

    out.angle_rel_threshold = config.angle.rel_threshold;
    if (options.calibrate_angle) {
        const auto a = bisect(angle_fa, options.angle_rel_lo, options.angle_rel_hi, options.target_fa_per_trial,
                              options.max_iterations, false);
        out.angle_rel_threshold = a.value;
        out.angle_converged = a.converged;
        if (a.bound && (!out.achievable_bound || *a.bound > *out.achievable_bound)) out.achievable_bound = a.bound;
    }
    out.achieved_fa = angle_fa(out.angle_rel_threshold);
    return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t snr_index, std::size_t trial) {
    return derive_seed(master_seed, {stream::trial, snr_index, trial});
}

MetricsRow aggregate(const std::vector<TrialOutcome>& outcomes, const TrialConfig& config) {
    MetricsRow row;
    row.snr_db = config.snr_db;
    row.method = config.method;
    row.array = config.array;
    row.n_trials = outcomes.size();
    row.range_threshold_mult = config.range.threshold_mult;
    row.angle_rel_threshold = config.angle.rel_threshold;
    double se_r = 0.0, se_a = 0.0;
    for (const auto& o : outcomes) {
        row.targets += o.truth.size();
        row.hits += o.match.hits.size();
        row.false_alarms += o.match.false_alarms.size();
        for (const auto& [i, j] : o.match.hits) {
            const double dr = o.estimates[i].range_m - o.truth.targets[j].range_m;
            const double da = o.estimates[i].aoa_deg - o.truth.targets[j].aoa_rad * 180.0 / kPi;
            se_r += dr * dr;
            se_a += da * da;
        }
    }
    if (row.targets) row.hit_rate = static_cast<double>(row.hits) / static_cast<double>(row.targets);
    if (row.n_trials)
        row.false_alarm_rate = static_cast<double>(row.false_alarms) / static_cast<double>(row.n_trials);
    if (row.hits) {
        row.range_rmse_m = std::sqrt(se_r / static_cast<double>(row.hits));
        row.angle_rmse_deg = std::sqrt(se_a / static_cast<double>(row.hits));
    }
    return row;
}

std::vector<SweepPoint> monte_carlo(const TrialConfig& config, const std::vector<std::optional<double>>& snr_list,
                                    const MonteCarloOptions& options) {
    if (options.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    config.validate();
    std::vector<SweepPoint> out;
    for (std::size_t s = 0; s < snr_list.size(); ++s) {
        TrialConfig cfg = config;
        cfg.snr_db = snr_list[s];
        SweepPoint point;
        if (options.calibrate) {
            CalibrationOptions co = options.calibration;
            co.seed = derive_seed(options.master_seed, {stream::calibration, s});
            co.jobs = options.jobs;
            point.calibration = calibrate_threshold(cfg, co);
            cfg.range.threshold_mult = point.calibration->range_threshold_mult;
            cfg.angle.rel_threshold = point.calibration->angle_rel_threshold;
        }
        const auto outcomes = run_trials(
            cfg, options.n_trials, [&](std::size_t i) { return trial_seed(options.master_seed, s, i); },
            options.jobs);
        point.row = aggregate(outcomes, cfg);
        out.push_back(std::move(point));
    }
    return out;
}

}  // namespace mimo
