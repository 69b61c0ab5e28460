#include "mimo/range_detect.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mimo/fft.hpp"

namespace mimo {

SpectrumPlane::SpectrumPlane(RadarParams params, ArrayGeometry geometry)
    : params_(std::move(params)),
      geometry_(std::move(geometry)),
      channels_(geometry_.n_channels()),
      pulses_(params_.pulses_per_cpi),
      bins_(params_.samples_per_pulse),
      data_(channels_ * pulses_ * bins_) {}

std::vector<double> SpectrumPlane::magnitudes(std::size_t channel, std::size_t pulse) const {
    const auto r = row(channel, pulse);
    std::vector<double> out(r.size());
    std::transform(r.begin(), r.end(), out.begin(), [](const cd& v) { return std::abs(v); });
    return out;
}

std::vector<std::size_t> RangeDetectionSet::bins() const {
    std::vector<std::size_t> out;
    out.reserve(confirmed.size());
    for (const auto& c : confirmed) out.push_back(c.bin);
    return out;
}

SpectrumPlane dft_all(const IfDataCube& cube) {
    SpectrumPlane plane(cube.params(), cube.geometry());
    for (std::size_t ch = 0; ch < cube.n_channels(); ++ch)
        for (std::size_t p = 0; p < cube.n_pulses(); ++p) forward_dft(cube.row(ch, p), plane.row(ch, p));
    return plane;
}

double focus_kernel_magnitude(double x, double x_bar, std::size_t m_terms, double omega) {
    if (m_terms < 1) throw std::invalid_argument("m_terms must be >= 1");
    if (omega == 0.0) throw std::invalid_argument("omega must be non-zero");
    const double m = static_cast<double>(m_terms);
    // |g| is 2*pi periodic in phi; reduce to [-pi, pi] first.
    double phi = std::remainder((x - x_bar) * omega, 2.0 * kPi);
    if (std::abs(phi) < 1e-7) {
        // Taylor expansion around the removable singularity.
        return m * (1.0 - (m * m - 1.0) * phi * phi / 24.0);
    }
    return std::abs(std::sin(m * phi / 2.0) / std::sin(phi / 2.0));
}

double noise_floor(std::span<const double> magnitudes) {
    if (magnitudes.empty()) return 0.0;
    std::vector<double> tmp(magnitudes.begin(), magnitudes.end());
    const auto mid = tmp.begin() + static_cast<std::ptrdiff_t>(tmp.size() / 2);
    std::nth_element(tmp.begin(), mid, tmp.end());
    double median = *mid;
    if (tmp.size() % 2 == 0) {
        const double lower = *std::max_element(tmp.begin(), mid);
        median = 0.5 * (median + lower);
    }
    const double peak = *std::max_element(magnitudes.begin(), magnitudes.end());
    return std::max(median / std::log(2.0), 1e-9 * peak);
}

std::vector<std::size_t> local_maxima(std::span<const double> magnitudes) {
    std::vector<std::size_t> peaks;
    const std::size_t n = magnitudes.size();
    if (n == 1) peaks.push_back(0);
    if (n < 2) return peaks;
    for (std::size_t l = 0; l < n; ++l) {
        const double v = magnitudes[l];
        if (v > magnitudes[(l + n - 1) % n] && v >= magnitudes[(l + 1) % n]) peaks.push_back(l);
    }
    return peaks;
}

std::vector<std::size_t> detect_peaks(std::span<const double> magnitudes, double threshold_mult) {
    if (!(threshold_mult > 0.0)) throw std::invalid_argument("threshold_mult must be > 0");
    std::vector<std::size_t> peaks;
    if (magnitudes.empty()) return peaks;
    const double threshold = threshold_mult * noise_floor(magnitudes);
    for (std::size_t l : local_maxima(magnitudes))
        if (magnitudes[l] > threshold) peaks.push_back(l);
    return peaks;
}

namespace {

std::size_t bin_distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

bool any_within(const std::vector<std::size_t>& sorted, std::size_t b, std::size_t tol) {
    const std::size_t lo = b >= tol ? b - tol : 0;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), lo);
    return it != sorted.end() && *it <= b + tol;
}

}  // namespace

RangeDetectionSet binary_integrate(const std::vector<std::vector<std::vector<std::size_t>>>& detections,
                                   std::size_t m_of_pulses, std::size_t m_of_channels, std::size_t bin_tolerance,
                                   const RadarParams& params) {
    const std::size_t n_channels = detections.size();
    if (m_of_channels < 1 || m_of_channels > n_channels)
        throw std::invalid_argument("m_of_channels must lie in [1, channels]");
    for (const auto& ch : detections)
        if (m_of_pulses < 1 || m_of_pulses > ch.size())
            throw std::invalid_argument("m_of_pulses must lie in [1, pulses]");

    RangeDetectionSet out;
    out.channel_survivors.resize(n_channels);
    // weight[b]: total number of (channel, pulse) rows that detected exactly b and survived stage 1.
    std::vector<std::size_t> weight(params.samples_per_pulse, 0);

    for (std::size_t ch = 0; ch < n_channels; ++ch) {
        std::vector<std::vector<std::size_t>> rows = detections[ch];
        std::vector<std::size_t> candidates;
        for (auto& r : rows) {
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            candidates.insert(candidates.end(), r.begin(), r.end());
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

        for (std::size_t b : candidates) {
            if (b >= weight.size()) throw std::out_of_range("detected bin exceeds samples_per_pulse");
            std::size_t votes = 0;
            std::size_t exact = 0;
            for (const auto& r : rows) {
                if (any_within(r, b, bin_tolerance)) ++votes;
                if (std::binary_search(r.begin(), r.end(), b)) ++exact;
            }
            if (votes >= m_of_pulses) {
                out.channel_survivors[ch].push_back(b);
                weight[b] += exact;
            }
        }
    }

    std::vector<std::size_t> pooled;
    for (const auto& s : out.channel_survivors) pooled.insert(pooled.end(), s.begin(), s.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<std::size_t> support_of;
    for (std::size_t b : pooled) {
        std::size_t support = 0;
        for (const auto& s : out.channel_survivors)
            if (any_within(s, b, bin_tolerance)) ++support;
        if (support >= m_of_channels) {
            out.supported_bins.push_back(b);
            support_of.push_back(support);
        }
    }

    // Runs of supported bins closer than the tolerance form one cluster.
    std::size_t start = 0;
    const auto& q = out.supported_bins;
    while (start < q.size()) {
        std::size_t end = start + 1;
        while (end < q.size() && bin_distance(q[end], q[end - 1]) <= bin_tolerance) ++end;

        std::size_t total = 0;
        for (std::size_t i = start; i < end; ++i) total += weight[q[i]];
        std::size_t rep = q[start];
        std::size_t cum = 0;
        for (std::size_t i = start; i < end; ++i) {
            cum += weight[q[i]];
            if (2 * cum >= total) {
                rep = q[i];
                break;
            }
        }
        std::size_t support = 0;
        for (std::size_t i = start; i < end; ++i)
            if (q[i] == rep) support = support_of[i];
        if (out.confirmed.empty() || out.confirmed.back().bin != rep)
            out.confirmed.push_back({rep, bin_to_range(rep, params), support});
        start = end;
    }
    return out;
}

double bin_to_range(std::size_t l_prime, const RadarParams& params) {
    return params.light_speed_m_per_s * static_cast<double>(l_prime) /
           (2.0 * params.chirp_rate_hz_per_s * params.chirp_duration_s);
}

std::size_t range_to_nearest_bin(double range_m, const RadarParams& params) {
    const double l = 2.0 * params.chirp_rate_hz_per_s * params.chirp_duration_s * range_m / params.light_speed_m_per_s;
    return l <= 0.0 ? 0 : static_cast<std::size_t>(std::llround(l));
}

std::size_t default_m_of_pulses(const RadarParams& params) { return (params.pulses_per_cpi + 1) / 2; }

std::size_t default_m_of_channels(const ArrayGeometry& geometry) { return (geometry.n_channels() + 1) / 2; }

RangeDetectionSet detect_ranges(const SpectrumPlane& plane, const RangeDetectConfig& config) {
    std::vector<std::vector<std::vector<std::size_t>>> detections(plane.n_channels());
    for (std::size_t ch = 0; ch < plane.n_channels(); ++ch) {
        detections[ch].resize(plane.n_pulses());
        for (std::size_t p = 0; p < plane.n_pulses(); ++p)
            detections[ch][p] = detect_peaks(plane.magnitudes(ch, p), config.threshold_mult);
    }
    const std::size_t mp = config.m_of_pulses ? config.m_of_pulses : default_m_of_pulses(plane.params());
    const std::size_t mc = config.m_of_channels ? config.m_of_channels : default_m_of_channels(plane.geometry());
    return binary_integrate(detections, mp, mc, config.bin_tolerance, plane.params());
}

void write_spectrum_csv(std::ostream& os, const SpectrumPlane& plane) {
    os << "channel,pulse,bin,magnitude\n";
    for (std::size_t ch = 0; ch < plane.n_channels(); ++ch)
        for (std::size_t p = 0; p < plane.n_pulses(); ++p)
            for (std::size_t l = 0; l < plane.n_bins(); ++l)
                os << ch << ',' << p << ',' << l << ',' << std::abs(plane.at(ch, p, l)) << '\n';
}

}  // namespace mimo
