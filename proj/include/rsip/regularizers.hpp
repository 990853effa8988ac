#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rsip/grid.hpp"

namespace rsip {

enum class RegularizerKind { tv, laplacian };

inline constexpr double kTvEpsilon = 1e-10;

struct ValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

/// 3x3 (planar) or 3x3x3 (volume) zero-sum stencil, stored as integer
/// weights times a common scale so the zero sum is exact.
struct LapKernel {
    int ndim = 3;
    std::vector<double> weights;   // x fastest, 9 or 27 entries
    double scale = 1.0;

    double weight(int dx, int dy, int dz = 0) const;
    double sum() const;
};

/// ndim = 3: (1/26) * [[2 3 2; 3 6 3; 2 3 2], [3 6 3; 6 -88 6; 3 6 3], [2 3 2; 3 6 3; 2 3 2]].
/// ndim = 2: (1/8) * [1 2 1; 2 -12 2; 1 2 1].
LapKernel default_kernel(int ndim);

/// Smoothed isotropic total variation
///   sum_cells sqrt(sum_axes (forward difference)^2 + eps)
/// where a difference whose forward neighbour is off-grid or outside the
/// region is taken as 0.
class TotalVariation {
public:
    TotalVariation(MaskPtr mask, double epsilon = kTvEpsilon);

    double epsilon() const { return eps_; }
    ValueGrad evaluate(std::span<const double> sigma) const;
    /// Writes the gradient into grad and returns the value.
    double evaluate(std::span<const double> sigma, std::span<double> grad) const;

private:
    MaskPtr mask_;
    double eps_;
    int axes_;
    std::vector<std::int64_t> forward_;    // region index of +axis neighbour, per cell and axis
    std::vector<std::int64_t> backward_;   // region index of -axis neighbour whose difference uses this cell
    mutable std::vector<double> norm_;     // scratch
};

/// Squared norm of the kernel correlation, evaluated on cells whose whole
/// stencil neighbourhood lies in the region.
class LaplacianPenalty {
public:
    LaplacianPenalty(MaskPtr mask, LapKernel kernel);

    const LapKernel& kernel() const { return kernel_; }
    std::size_t valid_cells() const { return valid_.size(); }
    ValueGrad evaluate(std::span<const double> sigma) const;
    double evaluate(std::span<const double> sigma, std::span<double> grad) const;

private:
    MaskPtr mask_;
    LapKernel kernel_;
    std::size_t taps_;
    std::vector<std::size_t> valid_;                 // region indices of stencil centers
    std::vector<std::int64_t> valid_slot_;           // region index -> slot in valid_, or -1
    std::vector<std::int64_t> neighbours_;           // taps per region cell (-1 if outside)
    mutable std::vector<double> response_;           // scratch, per region cell
};

ValueGrad tv_value_grad(const ImageField& field, double epsilon = kTvEpsilon);
ValueGrad lap_value_grad(const ImageField& field, const LapKernel& kernel);

}  // namespace rsip
