#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mimo/classical.hpp"
#include "mimo/radar_core.hpp"
#include "mimo/range_detect.hpp"
#include "mimo/sparse_angle.hpp"

namespace mimo {

enum class ArrayKind { sparse, full };
enum class Method { proposed_omp, proposed_somp, classical };

std::string to_string(ArrayKind kind);
std::string to_string(Method method);
std::string to_string(Placement placement);
ArrayKind parse_array_kind(const std::string& s);
Method parse_method(const std::string& s);
Placement parse_placement(const std::string& s);

struct SceneSpec {
    bool random = true;
    std::size_t k = 5;
    double range_lo_m = 10.0;
    double range_hi_m = 40.0;
    double aoa_lo_deg = -15.0;
    double aoa_hi_deg = 15.0;
    /// Draw AOAs from the angle-grid points inside the bounds instead of the continuum.
    bool aoa_on_grid = false;
    /// Place ranges on DFT bin centers c l / (2 gamma T) at least min_bin_separation bins apart.
    bool range_on_grid = false;
    std::size_t min_bin_separation = 2;
    /// Used when random == false.
    std::vector<Target> fixed;
};

struct SparseArraySpec {
    std::size_t n_tx = 3;
    std::size_t n_rx = 3;
    double aperture_tx_wavelengths = 6.0;
    double aperture_rx_wavelengths = 6.0;
    Placement placement = Placement::uniform_random;
    /// Fixed draw for every trial; otherwise each trial draws its own array.
    std::optional<std::uint64_t> geometry_seed;
};

struct TrialConfig {
    RadarParams params = RadarParams::reference();
    ArrayKind array = ArrayKind::sparse;
    SparseArraySpec sparse;
    SceneSpec scene;
    /// nullopt means noiseless.
    std::optional<double> snr_db = 20.0;
    Method method = Method::proposed_somp;

    RangeDetectConfig range;
    AngleRecoveryConfig angle;
    AngleGrid grid = AngleGrid::reference();
    std::size_t fft_size = 256;

    double range_tol_m = 0.6;
    double angle_tol_deg = 1.0;

    void validate() const;
};

struct Estimate {
    double range_m = 0.0;
    double aoa_deg = 0.0;
    std::size_t bin = 0;
};

struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> hits;  ///< (estimate, truth)
    std::vector<std::size_t> false_alarms;                  ///< estimate indices
    std::vector<std::size_t> misses;                        ///< truth indices
};

struct TrialOutcome {
    std::vector<Estimate> estimates;
    TargetScene truth;
    MatchResult match;
    RangeDetectionSet ranges;
};

struct MetricsRow {
    std::optional<double> snr_db;
    Method method = Method::proposed_somp;
    ArrayKind array = ArrayKind::sparse;
    double hit_rate = 0.0;
    double false_alarm_rate = 0.0;  ///< false alarms per trial
    double range_rmse_m = 0.0;
    double angle_rmse_deg = 0.0;
    std::size_t n_trials = 0;
    std::size_t hits = 0;
    std::size_t false_alarms = 0;
    std::size_t targets = 0;
    double range_threshold_mult = 0.0;
    double angle_rel_threshold = 0.0;
};

ArrayGeometry make_geometry(const TrialConfig& config, std::uint64_t trial_seed);

TargetScene random_scene(const SceneSpec& spec, const AngleGrid& grid, const RadarParams& params, std::uint64_t seed);

/// Three broadside targets at 20.6, 20.0 and 19.4 m with unit gains of seeded random phase.
TargetScene close_target_scene(std::uint64_t seed);

/// Greedy one-to-one matching on max(|dR|/range_tol, |dtheta|/angle_tol), ties by index.
MatchResult match_hits(const std::vector<Estimate>& estimates, const TargetScene& truth, double range_tol_m = 0.6,
                       double angle_tol_deg = 1.0);

/// Synthesize, detect ranges, recover angles, score. Deterministic per seed.
TrialOutcome run_trial(const TrialConfig& config, std::uint64_t seed);

/// Which scenes the false-alarm rate is measured on while calibrating.
enum class CalibrationScenes { noise_only, configured };

struct CalibrationOptions {
    double target_fa_per_trial = 0.5;
    std::size_t n_cal_trials = 100;
    std::uint64_t seed = 1;
    CalibrationScenes range_scenes = CalibrationScenes::configured;
    CalibrationScenes angle_scenes = CalibrationScenes::configured;
    /// Part of the target budget spent on range-stage false alarms (confirmed bins far from every target).
    double range_fa_share = 0.5;
    bool calibrate_angle = true;
    double range_mult_lo = 1.0;
    double range_mult_hi = 200.0;
    double angle_rel_lo = 0.05;
    double angle_rel_hi = 1.0;
    std::size_t max_iterations = 14;
    std::size_t jobs = 1;
};

struct CalibrationResult {
    double range_threshold_mult = 0.0;
    double angle_rel_threshold = 0.0;
    double range_stage_fa = 0.0;  ///< spurious confirmed bins per trial at the chosen multiplier
    double achieved_fa = 0.0;     ///< end-to-end FA/trial on the angle-stage scenes
    bool range_converged = false;
    bool angle_converged = false;
    /// Set when the target rate is out of reach: the closest achievable FA/trial.
    std::optional<double> achievable_bound;
};

/// Mean false alarms per trial over seeded trials. noise_only forces an empty scene.
double false_alarm_rate(const TrialConfig& config, std::size_t n_trials, std::uint64_t seed, bool noise_only,
                        std::size_t jobs = 1);

CalibrationResult calibrate_threshold(const TrialConfig& config, const CalibrationOptions& options);

struct MonteCarloOptions {
    std::size_t n_trials = 300;
    std::uint64_t master_seed = 1;
    bool calibrate = true;
    CalibrationOptions calibration;
    std::size_t jobs = 1;
};

/// Per-trial seed; shared by every method and array so comparisons are paired.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t snr_index, std::size_t trial);

MetricsRow aggregate(const std::vector<TrialOutcome>& outcomes, const TrialConfig& config);

struct SweepPoint {
    MetricsRow row;
    std::optional<CalibrationResult> calibration;
};

std::vector<SweepPoint> monte_carlo(const TrialConfig& config, const std::vector<std::optional<double>>& snr_list,
                                    const MonteCarloOptions& options);

/// Runs trials [0, n) on up to `jobs` threads; results are in index order.
std::vector<TrialOutcome> run_trials(const TrialConfig& config, std::size_t n,
                                     const std::function<std::uint64_t(std::size_t)>& seed_of, std::size_t jobs);

}  // namespace mimo
