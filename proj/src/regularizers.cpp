#include "rsip/regularizers.hpp"

#include <cmath>

#include "rsip/errors.hpp"

namespace rsip {

double LapKernel::weight(int dx, int dy, int dz) const {
    const int idx = ndim == 2 ? (dx + 1) + 3 * (dy + 1) : (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1);
    return scale * weights[static_cast<std::size_t>(idx)];
}

double LapKernel::sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return scale * s;
}

LapKernel default_kernel(int ndim) {
    LapKernel k;
    k.ndim = ndim;
    if (ndim == 2) {
        k.weights = {1, 2, 1, 2, -12, 2, 1, 2, 1};
        k.scale = 1.0 / 8.0;
    } else if (ndim == 3) {
        k.weights = {2, 3, 2, 3, 6, 3, 2, 3, 2,
                     3, 6, 3, 6, -88, 6, 3, 6, 3,
                     2, 3, 2, 3, 6, 3, 2, 3, 2};
        k.scale = 1.0 / 26.0;
    } else {
        throw InvalidArgument("laplacian kernel: ndim must be 2 or 3");
    }
    return k;
}

// ---------------------------------------------------------------- TV

TotalVariation::TotalVariation(MaskPtr mask, double epsilon)
    : mask_(std::move(mask)), eps_(epsilon), axes_(mask_->grid().ndim) {
    if (!(epsilon > 0.0)) throw InvalidArgument("tv: epsilon must be > 0");
    const GridSpec& g = mask_->grid();
    const std::size_t n = mask_->size();
    forward_.assign(n * axes_, -1);
    backward_.assign(n * axes_, -1);
    for (std::size_t c = 0; c < n; ++c) {
        const auto [i, j, k] = g.coords(mask_->flat_of(c));
        const std::array<std::array<int, 3>, 3> step{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        for (int a = 0; a < axes_; ++a) {
            const auto& d = step[a];
            forward_[c * axes_ + a] = mask_->index_at(i + d[0], j + d[1], k + d[2]);
            backward_[c * axes_ + a] = mask_->index_at(i - d[0], j - d[1], k - d[2]);
        }
    }
    norm_.resize(n);
}

double TotalVariation::evaluate(std::span<const double> sigma, std::span<double> grad) const {
    const std::size_t n = mask_->size();
    if (sigma.size() != n || grad.size() != n) throw InvalidArgument("tv: field length mismatch");
    const auto count = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        double acc = eps_;
        for (int a = 0; a < axes_; ++a) {
            const std::int64_t f = forward_[c * axes_ + a];
            if (f < 0) continue;
            const double d = sigma[f] - sigma[c];
            acc += d * d;
        }
        norm_[c] = std::sqrt(acc);
    }
    double value = 0.0;
    for (std::size_t c = 0; c < n; ++c) value += norm_[c];

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        double g = 0.0;
        for (int a = 0; a < axes_; ++a) {
            const std::int64_t f = forward_[c * axes_ + a];
            if (f >= 0) g -= (sigma[f] - sigma[c]) / norm_[c];
            const std::int64_t b = backward_[c * axes_ + a];
            if (b >= 0) g += (sigma[c] - sigma[b]) / norm_[b];
        }
        grad[c] = g;
    }
    return value;
}

ValueGrad TotalVariation::evaluate(std::span<const double> sigma) const {
    ValueGrad out;
    out.grad.resize(mask_->size());
    out.value = evaluate(sigma, out.grad);
    return out;
}

// ---------------------------------------------------------------- Laplacian

LaplacianPenalty::LaplacianPenalty(MaskPtr mask, LapKernel kernel)
    : mask_(std::move(mask)), kernel_(std::move(kernel)) {
    const GridSpec& g = mask_->grid();
    if (kernel_.ndim != g.ndim) throw InvalidArgument("laplacian: kernel and grid dimensions differ");
    taps_ = kernel_.weights.size();
    if (taps_ != (g.ndim == 2 ? 9u : 27u)) throw InvalidArgument("laplacian: kernel has wrong tap count");

    const std::size_t n = mask_->size();
    const int zr = g.ndim == 3 ? 1 : 0;
    neighbours_.assign(n * taps_, -1);
    valid_slot_.assign(n, -1);
    for (std::size_t c = 0; c < n; ++c) {
        const auto [i, j, k] = g.coords(mask_->flat_of(c));
        std::size_t t = 0;
        bool complete = true;
        for (int dz = -zr; dz <= zr; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx, ++t) {
                    const std::int64_t nb = mask_->index_at(i + dx, j + dy, k + dz);
                    neighbours_[c * taps_ + t] = nb;
                    if (nb < 0) complete = false;
                }
            }
        }
        if (complete) {
            valid_slot_[c] = static_cast<std::int64_t>(valid_.size());
            valid_.push_back(c);
        }
    }
    response_.resize(n);
}

double LaplacianPenalty::evaluate(std::span<const double> sigma, std::span<double> grad) const {
    const std::size_t n = mask_->size();
    if (sigma.size() != n || grad.size() != n) throw InvalidArgument("laplacian: field length mismatch");
    const auto nvalid = static_cast<std::ptrdiff_t>(valid_.size());

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < nvalid; ++s) {
        const std::size_t c = valid_[static_cast<std::size_t>(s)];
        const std::int64_t* nb = &neighbours_[c * taps_];
        double acc = 0.0;
        for (std::size_t t = 0; t < taps_; ++t) acc += kernel_.weights[t] * sigma[nb[t]];
        response_[c] = kernel_.scale * acc;
    }
    double value = 0.0;
    for (std::size_t c : valid_) value += response_[c] * response_[c];

    // Gather: cell c receives from every valid center v = c - offset(t),
    // which is c's neighbour at the mirrored tap.
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        const std::int64_t* nb = &neighbours_[static_cast<std::size_t>(c) * taps_];
        double g = 0.0;
        for (std::size_t t = 0; t < taps_; ++t) {
            const std::int64_t v = nb[taps_ - 1 - t];
            if (v < 0 || valid_slot_[v] < 0) continue;
            g += response_[v] * kernel_.weights[t];
        }
        grad[c] = 2.0 * kernel_.scale * g;
    }
    return value;
}

ValueGrad LaplacianPenalty::evaluate(std::span<const double> sigma) const {
    ValueGrad out;
    out.grad.resize(mask_->size());
    out.value = evaluate(sigma, out.grad);
    return out;
}

ValueGrad tv_value_grad(const ImageField& field, double epsilon) {
    return TotalVariation(field.mask, epsilon).evaluate(field.values);
}

ValueGrad lap_value_grad(const ImageField& field, const LapKernel& kernel) {
    return LaplacianPenalty(field.mask, kernel).evaluate(field.values);
}

}  // namespace rsip
