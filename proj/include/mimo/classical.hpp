#pragma once

#include <cstddef>
#include <vector>

#include "mimo/radar_core.hpp"
#include "mimo/range_detect.hpp"
#include "mimo/sparse_angle.hpp"

namespace mimo {

/// 4-Tx / 8-Rx filled array whose virtual array is a 20-element lambda/2 ULA.
struct FullArrayGeometry {
    ArrayGeometry array;
    /// Distinct virtual element locations in meters, ascending.
    std::vector<double> virtual_positions_m;
    /// Virtual element index of every flattened channel.
    std::vector<std::size_t> channel_to_element;
    double pitch_m = 0.0;
};

/// Transmitter pairs at lambda pitch on both ends, receivers at lambda/2 in the middle,
/// lambda/4 between the closest transmitter and receiver.
FullArrayGeometry full_array_geometry(const RadarParams& params);

/// Groups channels onto a uniform virtual grid of the given pitch; throws if a channel is off-grid.
FullArrayGeometry virtual_ula(const ArrayGeometry& array, double pitch_m);

/// |Y| summed over all pulses and channels.
std::vector<double> integrated_spectrum(const SpectrumPlane& plane);

/// Non-coherent integration, then one peak detection on the integrated spectrum.
RangeDetectionSet classical_range_detect(const SpectrumPlane& plane, double threshold_mult);
RangeDetectionSet classical_range_detect(const IfDataCube& cube, double threshold_mult);

/// Averages redundant channels onto the virtual ULA: pulse-summed element values.
Eigen::VectorXcd ula_snapshot(const BinMeasurement& meas, const FullArrayGeometry& ula);

/// Zero-padded spatial DFT magnitudes, index i <-> sin(theta) = 2 i / fft_size wrapped to [-1, 1).
std::vector<double> spatial_spectrum(const Eigen::VectorXcd& element_values, std::size_t fft_size);

/// sin(theta) of spatial DFT index i.
double spatial_bin_to_sin(std::size_t index, std::size_t fft_size);

/// |sum_c y_c exp(-j pi (Z/lambda) v_c u)| at the same u grid, for arbitrary virtual positions.
std::vector<double> nonuniform_spatial_spectrum(const Eigen::VectorXcd& channel_values, const ArrayGeometry& array,
                                                const RadarParams& params, std::size_t fft_size);

/// Circular local maxima of a spatial spectrum at or above rel_threshold * max.
AngleEstimateSet spectrum_peaks_to_angles(const std::vector<double>& spectrum, std::size_t fft_size,
                                          double rel_threshold);

/// FFT beamforming over the filled virtual ULA.
AngleEstimateSet classical_angle_detect(const BinMeasurement& meas, const FullArrayGeometry& ula,
                                        std::size_t fft_size, double rel_threshold);

/// Direct beamforming for a sparse array on its actual virtual positions.
AngleEstimateSet classical_angle_detect_sparse(const BinMeasurement& meas, const ArrayGeometry& array,
                                               const RadarParams& params, std::size_t fft_size,
                                               double rel_threshold);

}  // namespace mimo
