#include "rsip/metrics.hpp"

#include <cmath>
#include <vector>

#include "rsip/errors.hpp"

namespace rsip {

double relative_error(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw InvalidArgument("relative_error: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = predicted[k] - truth[k];
        num += d * d;
        den += truth[k] * truth[k];
    }
    if (!(den > 0.0)) throw InvalidArgument("relative_error: ground truth is zero");
    return std::sqrt(num / den);
}

double relative_error(const ImageField& predicted, const ImageField& truth) {
    if (!(*predicted.mask == *truth.mask)) throw InvalidArgument("relative_error: masks differ");
    return relative_error(std::span<const double>(predicted.values), std::span<const double>(truth.values));
}

double mssim(const ImageField& predicted, const ImageField& truth, const SsimParams& params) {
    if (!(*predicted.mask == *truth.mask)) throw InvalidArgument("mssim: masks differ");
    if (params.window_radius < 0 || !(params.gaussian_sigma > 0.0)) {
        throw InvalidArgument("mssim: invalid window parameters");
    }
    const RegionMask& mask = *truth.mask;
    const GridSpec& g = mask.grid();
    const int r = params.window_radius;
    const int rz = g.ndim == 3 ? r : 0;

    struct Tap {
        int dx, dy, dz;
        double w;
    };
    std::vector<Tap> taps;
    const double two_s2 = 2.0 * params.gaussian_sigma * params.gaussian_sigma;
    for (int dz = -rz; dz <= rz; ++dz) {
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                taps.push_back({dx, dy, dz, std::exp(-(dx * dx + dy * dy + dz * dz) / two_s2)});
            }
        }
    }

    const double c1 = params.chi1();
    const double c2 = params.chi2();
    const auto& p = predicted.values;
    const auto& t = truth.values;
    double total = 0.0;
    std::vector<std::int64_t> nb(taps.size());
    for (std::size_t c = 0; c < mask.size(); ++c) {
        const auto [i, j, k] = g.coords(mask.flat_of(c));
        double wsum = 0.0, mp = 0.0, mg = 0.0;
        for (std::size_t q = 0; q < taps.size(); ++q) {
            nb[q] = mask.index_at(i + taps[q].dx, j + taps[q].dy, k + taps[q].dz);
            if (nb[q] < 0) continue;
            wsum += taps[q].w;
            mp += taps[q].w * p[nb[q]];
            mg += taps[q].w * t[nb[q]];
        }
        mp /= wsum;
        mg /= wsum;
        double vp = 0.0, vg = 0.0, cov = 0.0;
        for (std::size_t q = 0; q < taps.size(); ++q) {
            if (nb[q] < 0) continue;
            const double dp = p[nb[q]] - mp;
            const double dg = t[nb[q]] - mg;
            vp += taps[q].w * dp * dp;
            vg += taps[q].w * dg * dg;
            cov += taps[q].w * dp * dg;
        }
        vp /= wsum;
        vg /= wsum;
        cov /= wsum;
        total += ((2.0 * mp * mg + c1) * (2.0 * cov + c2)) / ((mp * mp + mg * mg + c1) * (vp + vg + c2));
    }
    return total / static_cast<double>(mask.size());
}

}  // namespace rsip
