#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rsip/grid.hpp"

namespace rsip {

/// Point electrodes on the region boundary, numbered layer by layer
/// (layer 0 = bottom), counter-clockwise within a layer.
struct ElectrodeLayout {
    int n_per_layer = 16;
    int n_layers = 1;
    /// Region index of the cell under each electrode.
    std::vector<std::size_t> cells;

    std::size_t size() const { return cells.size(); }

    /// Electrodes equally spaced around the boundary ellipse of each layer.
    /// Layer k of a two-layer volume sits on z-slice nz/4 (bottom) or
    /// nz - 1 - nz/4 (top); a planar grid has a single layer.
    static ElectrodeLayout ring(const RegionMask& mask, int n_per_layer, int n_layers);
};

/// 16 electrodes for planar masks, two layers of 16 for volumes.
ElectrodeLayout default_layout(const RegionMask& mask);

/// One four-electrode measurement: current enters at drive_pos and leaves at
/// drive_neg; the voltage is u(meas_pos) - u(meas_neg). Ids are 0-based.
struct Measurement {
    int drive_pos;
    int drive_neg;
    int meas_pos;
    int meas_neg;

    bool operator==(const Measurement&) const = default;
};

struct Protocol {
    std::vector<Measurement> entries;

    std::size_t size() const { return entries.size(); }
    /// Throws if a drive pair overlaps its measurement pair, an entry repeats,
    /// or an id is outside [0, n_electrodes).
    void validate(int n_electrodes) const;
};

/// Adjacent drive / adjacent measure on a ring of n electrodes starting at
/// id `first`. With `reciprocal_only`, only entries whose measurement index
/// exceeds the drive index are kept (one of each reciprocal pair).
Protocol adjacent_protocol(int n, int first = 0, bool reciprocal_only = true);
/// Drive between vertically aligned electrodes (i, i + n) and measure on
/// every later aligned pair (j, j + n), j > i.
Protocol cross_layer_protocol(int n_per_layer);
/// Bottom-layer adjacent, top-layer adjacent, then cross-layer.
Protocol combined_3d_protocol(int n_per_layer = 16);
/// adjacent_protocol(16) for planar grids, combined_3d_protocol(16) for volumes.
Protocol default_protocol(int ndim);

struct SolverOptions {
    double rel_tol = 1e-12;
    /// 0 picks a limit proportional to the number of unknowns.
    int max_iterations = 0;
};

struct PotentialSolution {
    /// Potential per region cell, zero mean.
    std::vector<double> u;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Finite-volume resistor network of a conductivity field: one node per
/// region cell and one conductor per face shared by two region cells, with
/// conductance = harmonic mean conductivity * face area / cell spacing.
/// Faces on the region boundary carry no current.
class ConductanceNetwork {
public:
    struct Face {
        std::uint32_t a;
        std::uint32_t b;
        double geometry;     // face area / spacing
        double conductance;
    };

    explicit ConductanceNetwork(const ImageField& sigma);

    std::size_t nodes() const { return diagonal_.size(); }
    std::span<const Face> faces() const { return faces_; }
    const ImageField& sigma() const { return sigma_; }

    /// out = K u
    void apply(std::span<const double> u, std::span<double> out) const;

    /// Solves K u = current * (e_source - e_sink) with Jacobi-preconditioned
    /// conjugate gradients. Throws NumericalError if the relative residual
    /// does not reach opts.rel_tol.
    PotentialSolution solve(std::size_t source, std::size_t sink, double current = 1.0,
                            const SolverOptions& opts = {}) const;

    /// ||b - K u|| / ||b|| for the point-source right-hand side.
    double relative_residual(std::span<const double> u, std::size_t source, std::size_t sink,
                             double current) const;

private:
    ImageField sigma_;
    std::vector<Face> faces_;
    std::vector<double> diagonal_;
};

/// Full-grid potential for a point current source/sink pair given as region
/// indices. Cells outside the region are zero.
std::vector<double> solve_potential(const ImageField& sigma, std::size_t source, std::size_t sink,
                                    double current = 1.0, const SolverOptions& opts = {});

enum class FrameKind { raw, normalized };

struct VoltageFrame {
    std::vector<double> values;
    FrameKind kind = FrameKind::raw;

    std::size_t size() const { return values.size(); }
};

/// Dense row-major M x N matrix.
struct SensitivityMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    SensitivityMatrix() = default;
    SensitivityMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

/// Unit-current potentials for every electrode pair a protocol drives or
/// measures, solved once per pair.
class PairSolutions {
public:
    PairSolutions(const ConductanceNetwork& network, const ElectrodeLayout& layout,
                  const Protocol& protocol, const SolverOptions& opts = {});

    /// Potential for +1 A at electrode a and -1 A at electrode b.
    std::span<const double> get(int a, int b) const;
    std::size_t solve_count() const { return solutions_.size(); }
    double worst_residual() const { return worst_residual_; }

private:
    std::size_t n_electrodes_;
    std::vector<std::int64_t> slot_;   // (a * n + b) -> index into solutions_
    std::vector<std::vector<double>> solutions_;
    double worst_residual_ = 0.0;
};

/// Raw transfer voltages, one potential solve per distinct drive pair.
VoltageFrame simulate_voltages(const ImageField& sigma, const ElectrodeLayout& layout,
                               const Protocol& protocol, const SolverOptions& opts = {});

/// dV_m / d sigma_n of the discrete network by the adjoint (reciprocity)
/// identity: -sum over faces of n of d g_f / d sigma_n * du_drive * du_meas.
SensitivityMatrix raw_sensitivity(const ImageField& reference, const ElectrodeLayout& layout,
                                  const Protocol& protocol, const SolverOptions& opts = {});

/// Sensitivity of the normalized voltages to the normalized conductivity
/// change: J_mn = -S_mn * sigma_r[n] / V_r[m].
SensitivityMatrix jacobian(const ImageField& reference, const ElectrodeLayout& layout,
                           const Protocol& protocol, const SolverOptions& opts = {});

/// (v_o - v_r) / v_r elementwise.
VoltageFrame normalize_measurements(const VoltageFrame& v_o, const VoltageFrame& v_r);

/// -(s_o - s_r) / s_r elementwise.
ImageField normalize_conductivity(const ImageField& s_o, const ImageField& s_r);

inline constexpr double kNoiseFree = std::numeric_limits<double>::infinity();

/// Adds zero-mean Gaussian noise with variance mean(v^2) / 10^(snr_db / 10).
/// snr_db = +inf returns the frame unchanged.
VoltageFrame add_noise(const VoltageFrame& v, double snr_db, std::uint64_t seed);

/// y = J x and y = J^T x via the parallel kernels.
std::vector<double> multiply(const SensitivityMatrix& j, std::span<const double> x);
std::vector<double> multiply_transpose(const SensitivityMatrix& j, std::span<const double> x);

}  // namespace rsip
