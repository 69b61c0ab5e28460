#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mimo/radar_core.hpp"
#include "mimo/range_detect.hpp"

namespace mimo {

/// Candidate AOAs, uniformly spaced in the sin(theta) domain.
struct AngleGrid {
    std::vector<double> sin_values;

    static AngleGrid uniform(double sin_lo, double sin_hi, std::size_t points);
    /// 150 points on [-0.7071, 0.7071].
    static AngleGrid reference();

    std::size_t size() const { return sin_values.size(); }
    double sin_lo() const { return sin_values.front(); }
    double sin_hi() const { return sin_values.back(); }
    double aoa_rad(std::size_t g) const;
    double aoa_deg(std::size_t g) const;
    /// Index of the grid point closest in the sin domain.
    std::size_t nearest(double sin_value) const;

    void validate() const;
};

struct SteeringDictionary {
    Eigen::MatrixXcd columns;  ///< channels x G
    AngleGrid grid;
    ArrayGeometry geometry;
};

/// DFT coefficients of every channel and pulse at one confirmed range bin.
struct BinMeasurement {
    Eigen::MatrixXcd Y;  ///< channels x pulses
    std::size_t bin = 0;
    double range_m = 0.0;
};

enum class Solver { omp, somp };

struct AngleEstimate {
    std::size_t grid_index = 0;
    double aoa_deg = 0.0;
    double score = 0.0;
};

struct AngleEstimateSet {
    std::vector<AngleEstimate> entries;
    Solver solver = Solver::somp;
};

/// Support, least-squares coefficients (support x columns) and residual history of a pursuit run.
struct PursuitResult {
    std::vector<std::size_t> support;
    Eigen::MatrixXcd coefficients;
    std::vector<double> residual_norms;  ///< Frobenius norm after each iteration
    bool rank_deficient = false;         ///< a refit fell back to the minimum-norm solution
};

struct AngleRecoveryConfig {
    std::size_t k_max = 10;
    double residual_tol = 0.1;
    double rel_threshold = 0.25;
};

/// Entry (m,n): exp(j pi (Z/lambda) (alpha_n + beta_m) sin theta).
Eigen::VectorXcd steering_vector(double theta_rad, const ArrayGeometry& geometry, const RadarParams& params);
Eigen::VectorXcd steering_vector_sin(double sin_theta, const ArrayGeometry& geometry, const RadarParams& params);

SteeringDictionary build_dictionary(const AngleGrid& grid, const ArrayGeometry& geometry, const RadarParams& params);

/// Throws std::out_of_range for a bin outside the plane.
BinMeasurement extract_bin_measurements(const SpectrumPlane& plane, std::size_t l_prime);

/// Orthogonal matching pursuit on a single measurement vector.
PursuitResult omp(const Eigen::VectorXcd& y, const SteeringDictionary& dict, std::size_t k_max,
                  double residual_tol = 1e-6);

/// Simultaneous OMP: one support shared by every column of Y; atoms ranked by the l2 norm of
/// their correlations across columns.
PursuitResult somp(const Eigen::MatrixXcd& Y, const SteeringDictionary& dict, std::size_t k_max,
                   double residual_tol = 1e-6);

/// Indices i with scores[i] >= rel_threshold * max(scores), ascending.
std::vector<std::size_t> threshold_scores(std::span<const double> scores, double rel_threshold);

/// |x| per selected atom for OMP, row l2-norm / sqrt(P) for SOMP; same order as result.support.
std::vector<double> support_scores(const PursuitResult& result, Solver solver);

/// Scores each selected atom (|x| for OMP, row energy / sqrt(P) for SOMP) and keeps the strong ones.
AngleEstimateSet threshold_support(const PursuitResult& result, const AngleGrid& grid, Solver solver,
                                   double rel_threshold);

/// OMP on the coherent pulse sum, or SOMP on the full matrix.
PursuitResult pursue_bin(const BinMeasurement& meas, const SteeringDictionary& dict, Solver solver,
                         const AngleRecoveryConfig& config);

/// pursue_bin followed by threshold_support.
AngleEstimateSet recover_angles(const BinMeasurement& meas, const SteeringDictionary& dict, Solver solver,
                                const AngleRecoveryConfig& config);

/// CSV dump "grid_index,sin,aoa_deg,channel,re,im".
void write_dictionary_csv(std::ostream& os, const SteeringDictionary& dict);

}  // namespace mimo
