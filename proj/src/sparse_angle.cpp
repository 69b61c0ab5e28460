#include "mimo/sparse_angle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mimo {

AngleGrid AngleGrid::uniform(double sin_lo, double sin_hi, std::size_t points) {
    if (points < 2) throw std::invalid_argument("angle grid needs at least 2 points");
    if (!(sin_lo < sin_hi) || sin_lo < -1.0 || sin_hi > 1.0)
        throw std::invalid_argument("angle grid bounds must satisfy -1 <= lo < hi <= 1");
    AngleGrid g;
    g.sin_values.resize(points);
    const double step = (sin_hi - sin_lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g.sin_values[i] = sin_lo + step * static_cast<double>(i);
    g.sin_values.back() = sin_hi;
    return g;
}

AngleGrid AngleGrid::reference() { return uniform(-0.7071, 0.7071, 150); }

double AngleGrid::aoa_rad(std::size_t g) const { return std::asin(sin_values.at(g)); }

double AngleGrid::aoa_deg(std::size_t g) const { return aoa_rad(g) * 180.0 / kPi; }

std::size_t AngleGrid::nearest(double sin_value) const {
    auto it = std::lower_bound(sin_values.begin(), sin_values.end(), sin_value);
    if (it == sin_values.begin()) return 0;
    if (it == sin_values.end()) return sin_values.size() - 1;
    const auto hi = static_cast<std::size_t>(it - sin_values.begin());
    return (sin_value - sin_values[hi - 1] <= sin_values[hi] - sin_value) ? hi - 1 : hi;
}

void AngleGrid::validate() const {
    if (sin_values.empty()) throw std::invalid_argument("angle grid is empty");
    for (double v : sin_values)
        if (!(std::abs(v) <= 1.0)) throw std::invalid_argument("angle grid value outside [-1, 1]");
    if (sin_values.size() < 2) return;
    const double step = (sin_values.back() - sin_values.front()) / static_cast<double>(sin_values.size() - 1);
    for (std::size_t i = 1; i < sin_values.size(); ++i) {
        if (!(sin_values[i] > sin_values[i - 1])) throw std::invalid_argument("angle grid not strictly increasing");
        if (std::abs(sin_values[i] - sin_values[i - 1] - step) > 1e-12)
            throw std::invalid_argument("angle grid not uniform in sin(theta)");
    }
}

Eigen::VectorXcd steering_vector_sin(double sin_theta, const ArrayGeometry& geometry, const RadarParams& params) {
    const double scale = kPi * geometry.aperture_total_m() / params.wavelength_m();
    Eigen::VectorXcd v(static_cast<Eigen::Index>(geometry.n_channels()));
    for (std::size_t ch = 0; ch < geometry.n_channels(); ++ch)
        v(static_cast<Eigen::Index>(ch)) = std::polar(1.0, scale * geometry.virtual_position_norm(ch) * sin_theta);
    return v;
}

Eigen::VectorXcd steering_vector(double theta_rad, const ArrayGeometry& geometry, const RadarParams& params) {
    return steering_vector_sin(std::sin(theta_rad), geometry, params);
}

SteeringDictionary build_dictionary(const AngleGrid& grid, const ArrayGeometry& geometry, const RadarParams& params) {
    grid.validate();
    SteeringDictionary d{Eigen::MatrixXcd(static_cast<Eigen::Index>(geometry.n_channels()),
                                          static_cast<Eigen::Index>(grid.size())),
                         grid, geometry};
    for (std::size_t g = 0; g < grid.size(); ++g)
        d.columns.col(static_cast<Eigen::Index>(g)) = steering_vector_sin(grid.sin_values[g], geometry, params);
    return d;
}

BinMeasurement extract_bin_measurements(const SpectrumPlane& plane, std::size_t l_prime) {
    if (l_prime >= plane.n_bins()) throw std::out_of_range("range bin outside the spectrum");
    BinMeasurement m;
    m.bin = l_prime;
    m.range_m = bin_to_range(l_prime, plane.params());
    m.Y.resize(static_cast<Eigen::Index>(plane.n_channels()), static_cast<Eigen::Index>(plane.n_pulses()));
    for (std::size_t ch = 0; ch < plane.n_channels(); ++ch)
        for (std::size_t p = 0; p < plane.n_pulses(); ++p)
            m.Y(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(p)) = plane.at(ch, p, l_prime);
    return m;
}

namespace {

PursuitResult pursue(const Eigen::MatrixXcd& Y, const SteeringDictionary& dict, std::size_t k_max,
                     double residual_tol) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (Y.rows() != dict.columns.rows())
        throw std::invalid_argument("measurement rows do not match dictionary channels");

    PursuitResult out;
    out.coefficients.resize(0, Y.cols());
    const double y_norm = Y.norm();
    if (y_norm == 0.0 || dict.columns.cols() == 0) return out;

    const Eigen::Index n_atoms = dict.columns.cols();
    std::vector<bool> used(static_cast<std::size_t>(n_atoms), false);
    Eigen::MatrixXcd residual = Y;
    Eigen::MatrixXcd selected(Y.rows(), 0);

    const std::size_t limit = std::min<std::size_t>(k_max, static_cast<std::size_t>(n_atoms));
    while (out.support.size() < limit) {
        const Eigen::MatrixXcd corr = dict.columns.adjoint() * residual;
        const Eigen::VectorXd score = corr.rowwise().squaredNorm();
        Eigen::Index best = -1;
        for (Eigen::Index g = 0; g < n_atoms; ++g) {
            if (used[static_cast<std::size_t>(g)]) continue;
            if (best < 0 || score(g) > score(best)) best = g;
        }
        if (best < 0 || !(score(best) > 0.0)) break;

        used[static_cast<std::size_t>(best)] = true;
        out.support.push_back(static_cast<std::size_t>(best));
        selected.conservativeResize(Eigen::NoChange, selected.cols() + 1);
        selected.col(selected.cols() - 1) = dict.columns.col(best);

        const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(selected);
        if (cod.rank() < selected.cols()) out.rank_deficient = true;
        out.coefficients = cod.solve(Y);
        residual = Y - selected * out.coefficients;
        out.residual_norms.push_back(residual.norm());
        if (out.residual_norms.back() <= residual_tol * y_norm) break;
    }
    return out;
}

}  // namespace

PursuitResult omp(const Eigen::VectorXcd& y, const SteeringDictionary& dict, std::size_t k_max, double residual_tol) {
    return pursue(y, dict, k_max, residual_tol);
}

PursuitResult somp(const Eigen::MatrixXcd& Y, const SteeringDictionary& dict, std::size_t k_max,
                   double residual_tol) {
    return pursue(Y, dict, k_max, residual_tol);
}

std::vector<std::size_t> threshold_scores(std::span<const double> scores, double rel_threshold) {
    if (!(rel_threshold > 0.0) || rel_threshold > 1.0) throw std::invalid_argument("rel_threshold must be in (0, 1]");
    std::vector<std::size_t> keep;
    if (scores.empty()) return keep;
    const double top = *std::max_element(scores.begin(), scores.end());
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] >= rel_threshold * top) keep.push_back(i);
    return keep;
}

std::vector<double> support_scores(const PursuitResult& result, Solver solver) {
    std::vector<double> scores(result.support.size());
    const double cols = static_cast<double>(std::max<Eigen::Index>(result.coefficients.cols(), 1));
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto row = result.coefficients.row(static_cast<Eigen::Index>(i));
        scores[i] = solver == Solver::omp ? std::abs(row(0)) : row.norm() / std::sqrt(cols);
    }
    return scores;
}

AngleEstimateSet threshold_support(const PursuitResult& result, const AngleGrid& grid, Solver solver,
                                   double rel_threshold) {
    AngleEstimateSet out;
    out.solver = solver;
    if (result.support.empty()) return out;

    const std::vector<double> scores = support_scores(result, solver);
    for (std::size_t i : threshold_scores(scores, rel_threshold)) {
        const std::size_t g = result.support[i];
        out.entries.push_back({g, grid.aoa_deg(g), scores[i]});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const AngleEstimate& a, const AngleEstimate& b) { return a.grid_index < b.grid_index; });
    return out;
}

PursuitResult pursue_bin(const BinMeasurement& meas, const SteeringDictionary& dict, Solver solver,
                         const AngleRecoveryConfig& config) {
    if (solver == Solver::omp) return omp(meas.Y.rowwise().sum(), dict, config.k_max, config.residual_tol);
    return somp(meas.Y, dict, config.k_max, config.residual_tol);
}

AngleEstimateSet recover_angles(const BinMeasurement& meas, const SteeringDictionary& dict, Solver solver,
                                const AngleRecoveryConfig& config) {
    return threshold_support(pursue_bin(meas, dict, solver, config), dict.grid, solver, config.rel_threshold);
}

void write_dictionary_csv(std::ostream& os, const SteeringDictionary& dict) {
    os << "grid_index,sin,aoa_deg,channel,re,im\n";
    for (Eigen::Index g = 0; g < dict.columns.cols(); ++g)
        for (Eigen::Index ch = 0; ch < dict.columns.rows(); ++ch) {
            const cd v = dict.columns(ch, g);
            os << g << ',' << dict.grid.sin_values[static_cast<std::size_t>(g)] << ','
               << dict.grid.aoa_deg(static_cast<std::size_t>(g)) << ',' << ch << ',' << v.real() << ',' << v.imag()
               << '\n';
        }
}

}  // namespace mimo
