#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rsip/errors.hpp"
#include "rsip/metrics.hpp"

using namespace rsip;

namespace {

// Direct cell-by-cell SSIM on an n x n grid with an explicit 2D inside
// table, local moments from raw sums.
double oracle_mssim(int n, const std::vector<std::vector<int>>& inside, const std::vector<std::vector<double>>& p,
                    const std::vector<std::vector<double>>& g) {
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03, s = 0.35;
    double total = 0.0;
    int count = 0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            if (!inside[y][x]) continue;
            double w = 0, sp = 0, sg = 0, spp = 0, sgg = 0, spg = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx < 0 || yy < 0 || xx >= n || yy >= n || !inside[yy][xx]) continue;
                    const double k = std::exp(-(dx * dx + dy * dy) / (2 * s * s));
                    w += k;
                    sp += k * p[yy][xx];
                    sg += k * g[yy][xx];
                    spp += k * p[yy][xx] * p[yy][xx];
                    sgg += k * g[yy][xx] * g[yy][xx];
                    spg += k * p[yy][xx] * g[yy][xx];
                }
            }
            const double mp = sp / w, mg = sg / w;
            const double vp = spp / w - mp * mp, vg = sgg / w - mg * mg, cv = spg / w - mp * mg;
            total += (2 * mp * mg + c1) * (2 * cv + c2) / ((mp * mp + mg * mg + c1) * (vp + vg + c2));
            ++count;
        }
    }
    return total / count;
}

}  // namespace

TEST_CASE("relative error identities") {
    const auto mask = share(make_circular_mask(10));
    const ImageField g(mask, testing::uniform_vector(mask->size(), -1, 1, 1));
    const ImageField zero = ImageField::filled(mask, 0.0);
    CHECK(relative_error(g, g) == 0.0);
    CHECK(std::abs(relative_error(zero, g) - 1.0) <= 1e-12);
    for (double a : {2.0, 0.5, -1.0, 3.0}) {
        auto scaled = g;
        for (double& x : scaled.values) x *= a;
        CHECK(std::abs(relative_error(scaled, g) - std::abs(a - 1.0)) <= 1e-12);
    }
    CHECK_THROWS_AS(relative_error(g, zero), InvalidArgument);
    CHECK_THROWS_AS(relative_error(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("mssim identities and range") {
    const auto mask = share(make_circular_mask(16));
    const ImageField x(mask, testing::uniform_vector(mask->size(), -1, 1, 2));
    CHECK(std::abs(mssim(x, x) - 1.0) <= 1e-12);
    auto neg = x;
    for (double& v : neg.values) v = -v;
    CHECK(mssim(neg, x) < 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ImageField a(mask, testing::uniform_vector(mask->size(), -1, 1, 100 + seed));
        const ImageField b(mask, testing::uniform_vector(mask->size(), -1, 1, 200 + seed));
        const double m = mssim(a, b);
        CHECK(m >= -1.0);
        CHECK(m <= 1.0);
    }
    const auto vol = share(make_cylindrical_mask(6, 6, 5));
    const ImageField v(vol, testing::uniform_vector(vol->size(), 0, 1, 3));
    CHECK(std::abs(mssim(v, v) - 1.0) <= 1e-12);
}

TEST_CASE("mssim matches a direct implementation on 5x5 fields") {
    const int n = 5;
    for (int variant = 0; variant < 2; ++variant) {
        std::vector<std::vector<int>> inside(n, std::vector<int>(n, 1));
        if (variant == 1) inside[0][0] = inside[0][4] = inside[4][0] = inside[4][4] = inside[2][3] = 0;
        std::vector<std::uint8_t> bytes;
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) bytes.push_back(static_cast<std::uint8_t>(inside[y][x]));
        }
        const auto mask = share(RegionMask(GridSpec::planar(n, n), bytes));
        const auto pv = testing::uniform_vector(25, -1, 1, 10 + variant);
        const auto gv = testing::uniform_vector(25, -1, 1, 20 + variant);
        std::vector<std::vector<double>> p(n, std::vector<double>(n)), g(n, std::vector<double>(n));
        std::vector<double> pf, gf;
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                p[y][x] = pv[y * n + x];
                g[y][x] = gv[y * n + x];
                if (inside[y][x]) {
                    pf.push_back(p[y][x]);
                    gf.push_back(g[y][x]);
                }
            }
        }
        const double got = mssim(ImageField(mask, pf), ImageField(mask, gf));
        CHECK(std::abs(got - oracle_mssim(n, inside, p, g)) <= 1e-12);
    }
}

TEST_CASE("metrics are invariant under a mask-preserving relabeling") {
    // transposing the grid maps the disk onto itself
    const int n = 14;
    const auto mask = share(make_circular_mask(n));
    const auto& grid = mask->grid();
    const ImageField a(mask, testing::uniform_vector(mask->size(), -1, 1, 5));
    const ImageField b(mask, testing::uniform_vector(mask->size(), -1, 1, 6));
    auto transpose = [&](const ImageField& f) {
        std::vector<double> out(f.size());
        for (std::size_t c = 0; c < f.size(); ++c) {
            const auto ij = grid.coords(mask->flat_of(c));
            out[mask->index_at(ij[1], ij[0], 0)] = f.values[c];
        }
        return ImageField(mask, out);
    };
    CHECK(std::abs(mssim(transpose(a), transpose(b)) - mssim(a, b)) <= 1e-12);
    CHECK(std::abs(relative_error(transpose(a), transpose(b)) - relative_error(a, b)) <= 1e-12);
}

TEST_CASE("metrics reject mismatched masks") {
    const auto m1 = share(make_circular_mask(8));
    const auto m2 = share(make_circular_mask(9));
    CHECK_THROWS_AS(mssim(ImageField::filled(m1, 1.0), ImageField::filled(m2, 1.0)), InvalidArgument);
}
