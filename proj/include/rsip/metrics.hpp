#pragma once

#include <span>

#include "rsip/grid.hpp"

namespace rsip {

struct SsimParams {
    double psi1 = 0.01;
    double psi2 = 0.03;
    double gamma = 1.0;            // dynamic range
    double gaussian_sigma = 0.35;  // in cells
    int window_radius = 1;

    double chi1() const { return (psi1 * gamma) * (psi1 * gamma); }
    double chi2() const { return (psi2 * gamma) * (psi2 * gamma); }
};

/// ||p - g|| / ||g||. Throws InvalidArgument when g is zero or lengths differ.
double relative_error(std::span<const double> predicted, std::span<const double> truth);
double relative_error(const ImageField& predicted, const ImageField& truth);

/// Mean SSIM over the region cells. Local statistics use a Gaussian window
/// whose weights are renormalized over the in-region part of the window.
double mssim(const ImageField& predicted, const ImageField& truth, const SsimParams& params = {});

}  // namespace rsip
