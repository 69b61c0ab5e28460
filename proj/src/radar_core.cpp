#include "mimo/radar_core.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace mimo {

namespace {

double frac(double cycles) { return cycles - std::floor(cycles); }

}  // namespace

RadarParams RadarParams::make(double carrier_freq_hz, double bandwidth_hz, double chirp_duration_s,
                              double sample_rate_hz, std::size_t pulses_per_cpi) {
    RadarParams p;
    p.carrier_freq_hz = carrier_freq_hz;
    p.bandwidth_hz = bandwidth_hz;
    p.chirp_duration_s = chirp_duration_s;
    p.chirp_rate_hz_per_s = bandwidth_hz / chirp_duration_s;
    p.sample_rate_hz = sample_rate_hz;
    const double n = sample_rate_hz * chirp_duration_s;
    p.samples_per_pulse = std::isfinite(n) && n > 0.0 ? static_cast<std::size_t>(std::llround(n)) : 0;
    p.pulses_per_cpi = pulses_per_cpi;
    p.validate();
    return p;
}

RadarParams RadarParams::reference() { return make(9.4e9, 250e6, 363e-6, 1.4e6, 10); }

void RadarParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("radar parameter must be positive and finite: ") + name);
    };
    positive(carrier_freq_hz, "carrier_freq_hz");
    positive(bandwidth_hz, "bandwidth_hz");
    positive(chirp_duration_s, "chirp_duration_s");
    positive(chirp_rate_hz_per_s, "chirp_rate_hz_per_s");
    positive(sample_rate_hz, "sample_rate_hz");
    positive(light_speed_m_per_s, "light_speed_m_per_s");
    if (samples_per_pulse < 2) throw std::invalid_argument("samples_per_pulse must be at least 2");
    if (pulses_per_cpi < 1) throw std::invalid_argument("pulses_per_cpi must be at least 1");
    if (std::abs(chirp_rate_hz_per_s * chirp_duration_s - bandwidth_hz) > 1e-9 * bandwidth_hz)
        throw std::invalid_argument("chirp rate times duration must equal the bandwidth");
    const double n = sample_rate_hz * chirp_duration_s;
    if (std::abs(n - static_cast<double>(samples_per_pulse)) > 0.5)
        throw std::invalid_argument("samples_per_pulse must be round(f_s * T)");
}

std::size_t ArrayGeometry::channel_index(std::size_t m_rx, std::size_t n_tx_index) const {
    if (m_rx >= n_rx() || n_tx_index >= n_tx()) throw std::out_of_range("channel index out of range");
    return n_tx_index * n_rx() + m_rx;
}

std::pair<std::size_t, std::size_t> ArrayGeometry::channel_pair(std::size_t flat) const {
    if (flat >= n_channels()) throw std::out_of_range("flat channel index out of range");
    return {flat % n_rx(), flat / n_rx()};
}

double ArrayGeometry::virtual_position_norm(std::size_t flat) const {
    const auto [m, n] = channel_pair(flat);
    return tx_positions_norm[n] + rx_positions_norm[m];
}

double ArrayGeometry::virtual_position_m(std::size_t flat) const {
    return 0.5 * aperture_total_m() * virtual_position_norm(flat);
}

void ArrayGeometry::validate() const {
    if (tx_positions_norm.empty() || rx_positions_norm.empty())
        throw std::invalid_argument("array needs at least one transmitter and one receiver");
    if (!(aperture_tx_m >= 0.0) || !(aperture_rx_m >= 0.0) || !(aperture_total_m() > 0.0))
        throw std::invalid_argument("apertures must be non-negative with a positive total");
    const double z = aperture_total_m();
    const double tol = 1e-12;
    for (double a : tx_positions_norm)
        if (!(std::abs(a) <= aperture_tx_m / z + tol))
            throw std::invalid_argument("transmitter position outside [-Z_T/Z, Z_T/Z]");
    for (double b : rx_positions_norm)
        if (!(std::abs(b) <= aperture_rx_m / z + tol))
            throw std::invalid_argument("receiver position outside [-Z_R/Z, Z_R/Z]");
}

IfDataCube::IfDataCube(RadarParams params, ArrayGeometry geometry)
    : params_(std::move(params)),
      geometry_(std::move(geometry)),
      channels_(geometry_.n_channels()),
      pulses_(params_.pulses_per_cpi),
      samples_(params_.samples_per_pulse),
      data_(channels_ * pulses_ * samples_) {}

double range_delay(const Target& target, double light_speed) { return 2.0 * target.range_m / light_speed; }

double total_delay(const Target& target, const ArrayGeometry& geometry, std::size_t m_rx, std::size_t n_tx,
                   double light_speed) {
    const double v = geometry.virtual_position_norm(geometry.channel_index(m_rx, n_tx));
    const double angular = geometry.aperture_total_m() * v * std::sin(target.aoa_rad) / (2.0 * light_speed);
    return range_delay(target, light_speed) + angular;
}

double noise_sigma_from_snr(double snr_db) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
    return std::sqrt(std::pow(10.0, -snr_db / 10.0));
}

IfDataCube synthesize_cube(const RadarParams& params, const ArrayGeometry& geometry, const TargetScene& scene,
                           double sigma, std::uint64_t seed) {
    params.validate();
    geometry.validate();
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("noise sigma must be >= 0");

    const double c = params.light_speed_m_per_s;
    const double gamma = params.chirp_rate_hz_per_s;
    const double fs = params.sample_rate_hz;
    for (std::size_t k = 0; k < scene.size(); ++k) {
        const Target& tg = scene.targets[k];
        if (!(tg.range_m > 0.0) || !(std::abs(tg.aoa_rad) < kPi / 2))
            throw std::invalid_argument("target " + std::to_string(k) +
                                        ": range must be > 0 and |aoa| < pi/2");
        const double beat = gamma * range_delay(tg, c);
        if (beat >= fs / 2.0)
            throw std::invalid_argument("target " + std::to_string(k) + " at " + std::to_string(tg.range_m) +
                                        " m has beat frequency " + std::to_string(beat) +
                                        " Hz above f_s/2; it would alias");
    }

    IfDataCube cube(params, geometry);
    const std::size_t n = cube.n_samples();

    // Cycle counts are reduced modulo 1 before scaling by 2*pi. f_c*tau is ~1e3 cycles
    // for short-range scenes, so double precision keeps >= 12 digits of fractional phase.
    std::vector<cd> clean(n);
    for (std::size_t ch = 0; ch < cube.n_channels(); ++ch) {
        std::fill(clean.begin(), clean.end(), cd{});
        const auto [m, nt] = geometry.channel_pair(ch);
        for (const Target& tg : scene.targets) {
            const double tau = total_delay(tg, geometry, m, nt, c);
            const double base = frac(params.carrier_freq_hz * tau - 0.5 * gamma * tau * tau);
            const double step = gamma * tau / fs;
            const cd amp = std::conj(tg.gain);
            for (std::size_t t = 0; t < n; ++t) {
                const double cyc = frac(base + frac(step * static_cast<double>(t)));
                clean[t] += amp * std::polar(1.0, 2.0 * kPi * cyc);
            }
        }
        for (std::size_t p = 0; p < cube.n_pulses(); ++p) std::copy(clean.begin(), clean.end(), cube.row(ch, p).begin());
    }

    if (sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
        for (std::size_t ch = 0; ch < cube.n_channels(); ++ch)
            for (std::size_t p = 0; p < cube.n_pulses(); ++p)
                for (cd& v : cube.row(ch, p)) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    v += cd{re, im};
                }
    }
    return cube;
}

ArrayGeometry random_sparse_geometry(std::size_t n_tx, std::size_t n_rx, double aperture_tx_m,
                                     double aperture_rx_m, std::uint64_t seed, Placement placement) {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("element counts must be >= 1");
    if (!(aperture_tx_m > 0.0) || !(aperture_rx_m > 0.0)) throw std::invalid_argument("apertures must be > 0");

    ArrayGeometry g;
    g.aperture_tx_m = aperture_tx_m;
    g.aperture_rx_m = aperture_rx_m;
    const double z = g.aperture_total_m();
    const double tx_half = aperture_tx_m / z;
    const double rx_half = aperture_rx_m / z;

    auto spaced = [](std::size_t count, double half) {
        std::vector<double> out(count, 0.0);
        if (count == 1) return out;
        for (std::size_t i = 0; i < count; ++i)
            out[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(count - 1);
        return out;
    };

    if (placement == Placement::uniform_spaced) {
        g.tx_positions_norm = spaced(n_tx, tx_half);
        g.rx_positions_norm = spaced(n_rx, rx_half);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> tx(-tx_half, tx_half);
        std::uniform_real_distribution<double> rx(-rx_half, rx_half);
        for (std::size_t i = 0; i < n_tx; ++i) g.tx_positions_norm.push_back(tx(rng));
        for (std::size_t i = 0; i < n_rx; ++i) g.rx_positions_norm.push_back(rx(rng));
    }
    return g;
}

}  // namespace mimo
