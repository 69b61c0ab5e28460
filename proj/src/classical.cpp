#include "mimo/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mimo/fft.hpp"

namespace mimo {

FullArrayGeometry full_array_geometry(const RadarParams& params) {
    const double lambda = params.wavelength_m();
    // Receivers at 0, 0.5, ..., 3.5 lambda; transmitters at -1.25, -0.25, 3.75, 4.75 lambda.
    std::vector<double> rx_m, tx_m{-1.25 * lambda, -0.25 * lambda, 3.75 * lambda, 4.75 * lambda};
    for (int i = 0; i < 8; ++i) rx_m.push_back(0.5 * lambda * i);

    // Both sub-arrays share the center 1.75 lambda; re-center so positions are +-aperture/2.
    const double center = 1.75 * lambda;
    ArrayGeometry g;
    g.aperture_tx_m = tx_m.back() - tx_m.front();
    g.aperture_rx_m = rx_m.back() - rx_m.front();
    const double z = g.aperture_total_m();
    for (double x : tx_m) g.tx_positions_norm.push_back(2.0 * (x - center) / z);
    for (double x : rx_m) g.rx_positions_norm.push_back(2.0 * (x - center) / z);
    g.validate();
    return virtual_ula(g, 0.5 * lambda);
}

FullArrayGeometry virtual_ula(const ArrayGeometry& array, double pitch_m) {
    if (!(pitch_m > 0.0)) throw std::invalid_argument("virtual pitch must be > 0");
    FullArrayGeometry out;
    out.array = array;
    out.pitch_m = pitch_m;

    double lo = array.virtual_position_m(0);
    for (std::size_t ch = 1; ch < array.n_channels(); ++ch) lo = std::min(lo, array.virtual_position_m(ch));

    std::map<long long, std::size_t> slot_of;
    std::vector<long long> slots(array.n_channels());
    for (std::size_t ch = 0; ch < array.n_channels(); ++ch) {
        const double k = (array.virtual_position_m(ch) - lo) / pitch_m;
        const long long ki = std::llround(k);
        if (std::abs(k - static_cast<double>(ki)) > 1e-6) throw std::invalid_argument("channel is not on the ULA grid");
        slots[ch] = ki;
        slot_of[ki] = 0;
    }
    std::size_t next = 0;
    for (auto& [k, idx] : slot_of) {
        idx = next++;
        out.virtual_positions_m.push_back(lo + pitch_m * static_cast<double>(k));
    }
    for (std::size_t ch = 0; ch < array.n_channels(); ++ch) out.channel_to_element.push_back(slot_of[slots[ch]]);
    // Every grid slot between the extremes must be filled for the FFT to be a ULA transform.
    if (!slot_of.empty() && static_cast<std::size_t>(slot_of.rbegin()->first + 1) != slot_of.size())
        throw std::invalid_argument("virtual array has holes; not a filled ULA");
    return out;
}

std::vector<double> integrated_spectrum(const SpectrumPlane& plane) {
    std::vector<double> acc(plane.n_bins(), 0.0);
    for (std::size_t ch = 0; ch < plane.n_channels(); ++ch)
        for (std::size_t p = 0; p < plane.n_pulses(); ++p) {
            const auto r = plane.row(ch, p);
            for (std::size_t l = 0; l < r.size(); ++l) acc[l] += std::abs(r[l]);
        }
    return acc;
}

RangeDetectionSet classical_range_detect(const SpectrumPlane& plane, double threshold_mult) {
    RangeDetectionSet out;
    const auto spectrum = integrated_spectrum(plane);
    for (std::size_t l : detect_peaks(spectrum, threshold_mult)) {
        out.supported_bins.push_back(l);
        out.confirmed.push_back({l, bin_to_range(l, plane.params()), plane.n_channels()});
    }
    return out;
}

RangeDetectionSet classical_range_detect(const IfDataCube& cube, double threshold_mult) {
    return classical_range_detect(dft_all(cube), threshold_mult);
}

Eigen::VectorXcd ula_snapshot(const BinMeasurement& meas, const FullArrayGeometry& ula) {
    const std::size_t n_el = ula.virtual_positions_m.size();
    if (static_cast<std::size_t>(meas.Y.rows()) != ula.channel_to_element.size())
        throw std::invalid_argument("measurement rows do not match the array channels");
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_el));
    std::vector<double> count(n_el, 0.0);
    const Eigen::VectorXcd pulse_sum = meas.Y.rowwise().sum();
    for (std::size_t ch = 0; ch < ula.channel_to_element.size(); ++ch) {
        const std::size_t e = ula.channel_to_element[ch];
        sum(static_cast<Eigen::Index>(e)) += pulse_sum(static_cast<Eigen::Index>(ch));
        count[e] += 1.0;
    }
    for (std::size_t e = 0; e < n_el; ++e) sum(static_cast<Eigen::Index>(e)) /= count[e];
    return sum;
}

double spatial_bin_to_sin(std::size_t index, std::size_t fft_size) {
    const double i = static_cast<double>(index);
    const double n = static_cast<double>(fft_size);
    return 2.0 * (index < fft_size / 2 ? i : i - n) / n;
}

std::vector<double> spatial_spectrum(const Eigen::VectorXcd& element_values, std::size_t fft_size) {
    if (fft_size < static_cast<std::size_t>(element_values.size()))
        throw std::invalid_argument("fft_size must be at least the number of elements");
    std::vector<cd> padded(fft_size, cd{}), out(fft_size);
    for (Eigen::Index k = 0; k < element_values.size(); ++k) padded[static_cast<std::size_t>(k)] = element_values(k);
    forward_dft(padded, out);
    std::vector<double> mag(fft_size);
    std::transform(out.begin(), out.end(), mag.begin(), [](const cd& v) { return std::abs(v); });
    return mag;
}

std::vector<double> nonuniform_spatial_spectrum(const Eigen::VectorXcd& channel_values, const ArrayGeometry& array,
                                                const RadarParams& params, std::size_t fft_size) {
    if (static_cast<std::size_t>(channel_values.size()) != array.n_channels())
        throw std::invalid_argument("channel count mismatch");
    const double scale = kPi * array.aperture_total_m() / params.wavelength_m();
    std::vector<double> mag(fft_size);
    for (std::size_t i = 0; i < fft_size; ++i) {
        const double u = spatial_bin_to_sin(i, fft_size);
        cd acc{};
        for (std::size_t ch = 0; ch < array.n_channels(); ++ch)
            acc += channel_values(static_cast<Eigen::Index>(ch)) *
                   std::polar(1.0, -scale * array.virtual_position_norm(ch) * u);
        mag[i] = std::abs(acc);
    }
    return mag;
}

AngleEstimateSet spectrum_peaks_to_angles(const std::vector<double>& spectrum, std::size_t fft_size,
                                          double rel_threshold) {
    if (!(rel_threshold > 0.0) || rel_threshold > 1.0) throw std::invalid_argument("rel_threshold must be in (0, 1]");
    AngleEstimateSet out;
    if (spectrum.empty()) return out;
    const double top = *std::max_element(spectrum.begin(), spectrum.end());
    if (!(top > 0.0)) return out;
    for (std::size_t i : local_maxima(spectrum)) {
        const double v = spectrum[i];
        if (v < rel_threshold * top) continue;
        out.entries.push_back({i, std::asin(spatial_bin_to_sin(i, fft_size)) * 180.0 / kPi, v});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const AngleEstimate& a, const AngleEstimate& b) { return a.aoa_deg < b.aoa_deg; });
    return out;
}

AngleEstimateSet classical_angle_detect(const BinMeasurement& meas, const FullArrayGeometry& ula,
                                        std::size_t fft_size, double rel_threshold) {
    return spectrum_peaks_to_angles(spatial_spectrum(ula_snapshot(meas, ula), fft_size), fft_size, rel_threshold);
}

AngleEstimateSet classical_angle_detect_sparse(const BinMeasurement& meas, const ArrayGeometry& array,
                                               const RadarParams& params, std::size_t fft_size,
                                               double rel_threshold) {
    const Eigen::VectorXcd pulse_sum = meas.Y.rowwise().sum();
    return spectrum_peaks_to_angles(nonuniform_spatial_spectrum(pulse_sum, array, params, fft_size), fft_size,
                                    rel_threshold);
}

}  // namespace mimo
