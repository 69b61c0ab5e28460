#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mimo {

using cd = std::complex<double>;

inline constexpr double kLightSpeed = 2.99792458e8;
inline constexpr double kPi = 3.14159265358979323846;

/// Chirp and sampling constants of one FMCW radar configuration.
struct RadarParams {
    double carrier_freq_hz = 0.0;
    double bandwidth_hz = 0.0;
    double chirp_duration_s = 0.0;
    double chirp_rate_hz_per_s = 0.0;
    double sample_rate_hz = 0.0;
    std::size_t samples_per_pulse = 0;
    std::size_t pulses_per_cpi = 0;
    double light_speed_m_per_s = kLightSpeed;

    /// Derives the chirp rate B/T and N = round(f_s T); throws on invalid input.
    static RadarParams make(double carrier_freq_hz, double bandwidth_hz, double chirp_duration_s,
                            double sample_rate_hz, std::size_t pulses_per_cpi);

    /// X-band reference setup: 9.4 GHz, 250 MHz over 363 us, 1.4 MHz sampling, 10 pulses.
    static RadarParams reference();

    double wavelength_m() const { return light_speed_m_per_s / carrier_freq_hz; }

    /// Throws std::invalid_argument if any invariant is broken.
    void validate() const;
};

/// Normalized transmitter/receiver positions. Physical positions are Z*alpha/2 and Z*beta/2.
///
/// Virtual channels are flattened transmitter-major: flat = n_tx * N_R + m_rx.
struct ArrayGeometry {
    std::vector<double> tx_positions_norm;
    std::vector<double> rx_positions_norm;
    double aperture_tx_m = 0.0;
    double aperture_rx_m = 0.0;

    double aperture_total_m() const { return aperture_tx_m + aperture_rx_m; }
    std::size_t n_tx() const { return tx_positions_norm.size(); }
    std::size_t n_rx() const { return rx_positions_norm.size(); }
    std::size_t n_channels() const { return n_tx() * n_rx(); }

    std::size_t channel_index(std::size_t m_rx, std::size_t n_tx) const;
    /// Inverse of channel_index: returns {m_rx, n_tx}.
    std::pair<std::size_t, std::size_t> channel_pair(std::size_t flat) const;

    /// alpha_n + beta_m of a flattened channel.
    double virtual_position_norm(std::size_t flat) const;
    /// Physical virtual element location Z*(alpha_n + beta_m)/2 in meters.
    double virtual_position_m(std::size_t flat) const;

    void validate() const;
};

enum class Placement { uniform_random, uniform_spaced };

struct Target {
    double range_m = 0.0;
    double aoa_rad = 0.0;
    cd gain{1.0, 0.0};
};

struct TargetScene {
    std::vector<Target> targets;
    std::size_t size() const { return targets.size(); }
    bool empty() const { return targets.empty(); }
};

/// Complex IF samples, shape channels x pulses x samples, row-major in that order.
class IfDataCube {
public:
    IfDataCube(RadarParams params, ArrayGeometry geometry);

    std::size_t n_channels() const { return channels_; }
    std::size_t n_pulses() const { return pulses_; }
    std::size_t n_samples() const { return samples_; }

    cd& at(std::size_t channel, std::size_t pulse, std::size_t t) {
        return data_[(channel * pulses_ + pulse) * samples_ + t];
    }
    const cd& at(std::size_t channel, std::size_t pulse, std::size_t t) const {
        return data_[(channel * pulses_ + pulse) * samples_ + t];
    }
    std::span<cd> row(std::size_t channel, std::size_t pulse) {
        return {data_.data() + (channel * pulses_ + pulse) * samples_, samples_};
    }
    std::span<const cd> row(std::size_t channel, std::size_t pulse) const {
        return {data_.data() + (channel * pulses_ + pulse) * samples_, samples_};
    }
    std::span<const cd> data() const { return data_; }

    const RadarParams& params() const { return params_; }
    const ArrayGeometry& geometry() const { return geometry_; }

private:
    RadarParams params_;
    ArrayGeometry geometry_;
    std::size_t channels_;
    std::size_t pulses_;
    std::size_t samples_;
    std::vector<cd> data_;
};

/// Range delay plus angular delay seen on receiver m from transmitter n.
double total_delay(const Target& target, const ArrayGeometry& geometry, std::size_t m_rx,
                   std::size_t n_tx, double light_speed = kLightSpeed);

double range_delay(const Target& target, double light_speed = kLightSpeed);

/// Per-sample noise standard deviation for SNR = -10 log10(sigma^2).
double noise_sigma_from_snr(double snr_db);

/// Samples the demultiplexed IF signal of every virtual channel and pulse, plus CN(0, sigma^2) noise.
///
/// Throws std::invalid_argument when a target's beat frequency exceeds f_s/2.
IfDataCube synthesize_cube(const RadarParams& params, const ArrayGeometry& geometry,
                           const TargetScene& scene, double sigma, std::uint64_t seed);

ArrayGeometry random_sparse_geometry(std::size_t n_tx, std::size_t n_rx, double aperture_tx_m,
                                     double aperture_rx_m, std::uint64_t seed, Placement placement);

}  // namespace mimo
