#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mimo/radar_core.hpp"

namespace mimo {

/// Per-(channel, pulse) N-point DFT of an IF cube. Same layout as IfDataCube.
class SpectrumPlane {
public:
    SpectrumPlane(RadarParams params, ArrayGeometry geometry);

    std::size_t n_channels() const { return channels_; }
    std::size_t n_pulses() const { return pulses_; }
    std::size_t n_bins() const { return bins_; }

    cd& at(std::size_t channel, std::size_t pulse, std::size_t bin) {
        return data_[(channel * pulses_ + pulse) * bins_ + bin];
    }
    const cd& at(std::size_t channel, std::size_t pulse, std::size_t bin) const {
        return data_[(channel * pulses_ + pulse) * bins_ + bin];
    }
    std::span<cd> row(std::size_t channel, std::size_t pulse) {
        return {data_.data() + (channel * pulses_ + pulse) * bins_, bins_};
    }
    std::span<const cd> row(std::size_t channel, std::size_t pulse) const {
        return {data_.data() + (channel * pulses_ + pulse) * bins_, bins_};
    }
    /// |Y[l]| of one row.
    std::vector<double> magnitudes(std::size_t channel, std::size_t pulse) const;

    const RadarParams& params() const { return params_; }
    const ArrayGeometry& geometry() const { return geometry_; }

private:
    RadarParams params_;
    ArrayGeometry geometry_;
    std::size_t channels_;
    std::size_t pulses_;
    std::size_t bins_;
    std::vector<cd> data_;
};

struct ConfirmedBin {
    std::size_t bin = 0;
    double range_m = 0.0;
    std::size_t support_count = 0;  ///< channels confirming
};

struct RangeDetectionSet {
    std::vector<ConfirmedBin> confirmed;
    /// Per channel: bins that passed the pulse-level vote.
    std::vector<std::vector<std::size_t>> channel_survivors;
    /// Surviving bins backed by enough channels, before clustering into representatives.
    std::vector<std::size_t> supported_bins;

    std::vector<std::size_t> bins() const;
};

/// Binary-integration and peak-detector settings.
struct RangeDetectConfig {
    double threshold_mult = 3.0;
    std::size_t m_of_pulses = 0;    ///< 0 selects ceil(P/2)
    std::size_t m_of_channels = 0;  ///< 0 selects ceil(N_T N_R / 2)
    std::size_t bin_tolerance = 1;
};

SpectrumPlane dft_all(const IfDataCube& cube);

/// Exact |sum_{q<M} exp(j (x - x_bar) q omega)|, the Dirichlet kernel magnitude.
double focus_kernel_magnitude(double x, double x_bar, std::size_t m_terms, double omega);

/// median(|Y|) / ln 2, floored at 1e-9 * max(|Y|) so round-off ripple of a clean tone is never a peak.
double noise_floor(std::span<const double> magnitudes);

/// Circular local maxima: strictly above the left neighbor, not below the right one.
std::vector<std::size_t> local_maxima(std::span<const double> magnitudes);

/// Circular local maxima (left-strict, right non-strict) exceeding threshold_mult * noise_floor.
std::vector<std::size_t> detect_peaks(std::span<const double> magnitudes, double threshold_mult);

/// Two-stage M-of-N vote: across pulses per channel, then across channels.
///
/// detections is indexed [channel][pulse] and holds the detected bins of that row.
RangeDetectionSet binary_integrate(const std::vector<std::vector<std::vector<std::size_t>>>& detections,
                                   std::size_t m_of_pulses, std::size_t m_of_channels,
                                   std::size_t bin_tolerance, const RadarParams& params);

/// R' = c l' / (2 gamma T).
double bin_to_range(std::size_t l_prime, const RadarParams& params);
/// Nearest bin under the R' = c l' / (2 gamma T) mapping.
std::size_t range_to_nearest_bin(double range_m, const RadarParams& params);

/// Full proposed range stage: per-row peaks, then binary integration.
RangeDetectionSet detect_ranges(const SpectrumPlane& plane, const RangeDetectConfig& config);

std::size_t default_m_of_pulses(const RadarParams& params);
std::size_t default_m_of_channels(const ArrayGeometry& geometry);

/// CSV dump "channel,pulse,bin,magnitude" for debugging.
void write_spectrum_csv(std::ostream& os, const SpectrumPlane& plane);

}  // namespace mimo
