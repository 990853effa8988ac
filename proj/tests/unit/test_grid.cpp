#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "rsip/errors.hpp"
#include "rsip/grid.hpp"

using namespace rsip;

namespace {

// Cell centers within n/2 of the grid center, counted directly in cell units.
std::size_t disk_count(int n) {
    std::size_t count = 0;
    const double c = n / 2.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double dx = i + 0.5 - c;
            const double dy = j + 0.5 - c;
            if (dx * dx + dy * dy <= c * c) ++count;
        }
    }
    return count;
}

// Same-side test against each edge of a counter-clockwise triangle.
bool in_triangle(Point2 a, Point2 b, Point2 c, Point2 p) {
    auto side = [](Point2 u, Point2 v, Point2 w) { return (v.x - u.x) * (w.y - u.y) - (v.y - u.y) * (w.x - u.x); };
    return side(a, b, p) > 0 && side(b, c, p) > 0 && side(c, a, p) > 0;
}

}  // namespace

TEST_CASE("circular mask sizes") {
    const auto m64 = make_circular_mask(64);
    CHECK(m64.size() == disk_count(64));
    CHECK(std::abs(static_cast<double>(m64.size()) - 3228.0) <= 0.02 * 3228.0);

    const auto m4 = make_circular_mask(4);
    CHECK(m4.size() == disk_count(4));
    CHECK(m4.size() == 12);
    CHECK(make_circular_mask(2).size() == 4);

    std::size_t previous = 0;
    for (int n = 4; n <= 80; ++n) {
        const std::size_t s = make_circular_mask(n).size();
        CHECK(s == disk_count(n));
        CHECK(s >= previous);
        previous = s;
        if (n >= 32) {
            const double area = std::numbers::pi / 4.0 * n * n;
            CHECK(std::abs(static_cast<double>(s) - area) <= 0.02 * area);
        }
    }
}

TEST_CASE("cylindrical mask repeats the disk on every slice") {
    const auto c = make_cylindrical_mask(32, 32, 40);
    CHECK(std::abs(static_cast<double>(c.size()) - 32480.0) <= 0.02 * 32480.0);
    CHECK(c.size() == 40 * disk_count(32));
    CHECK(make_cylindrical_mask(4, 4, 5).size() == 5 * make_circular_mask(4).size());
    CHECK(make_cylindrical_mask(32, 32, 1).size() == make_circular_mask(32).size());
    CHECK(c.grid().ndim == 3);
}

TEST_CASE("polygon mask") {
    const auto grid = GridSpec::planar(9, 9);
    const std::vector<Point2> square{{-0.6, -0.6}, {0.6, -0.6}, {0.6, 0.6}, {-0.6, 0.6}};
    CHECK(make_polygon_mask(grid, square).size() == 81);

    // the third vertex is nudged so no cell center lies on an edge
    const Point2 a{-0.5, -0.5}, b{0.5, -0.5}, c{0.5, 0.503};
    const std::vector<Point2> tri{a, b, c};
    const auto m = make_polygon_mask(grid, tri);
    std::size_t expected = 0;
    for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) {
            const auto p = grid.cell_center(i, j);
            const bool in = in_triangle(a, b, c, {p[0], p[1]});
            CHECK(m.inside(i, j, 0) == in);
            expected += in;
        }
    }
    CHECK(m.size() == expected);
    CHECK(m.size() > 30);

    const std::vector<Point2> flat{{0, 0}, {0.2, 0.2}, {0.4, 0.4}};
    CHECK_THROWS_AS(make_polygon_mask(grid, flat), InvalidArgument);
}

TEST_CASE("index map is order preserving and bijective") {
    const auto m = make_circular_mask(16);
    std::size_t last = 0;
    for (std::size_t n = 0; n < m.size(); ++n) {
        const std::size_t f = m.flat_of(n);
        if (n > 0) CHECK(f > last);
        last = f;
        CHECK(m.index_of(f) == static_cast<std::int64_t>(n));
    }
    CHECK(m.index_at(0, 0, 0) == -1);
    CHECK(m.index_at(-1, 3, 0) == -1);
    CHECK(m.index_at(16, 3, 0) == -1);
}

TEST_CASE("embed and extract round trip") {
    const auto mask = share(make_circular_mask(12));
    const ImageField ones = ImageField::filled(mask, 1.0);
    const auto full = embed(ones);
    double sum = 0.0;
    for (double v : full) sum += v;
    CHECK(sum == static_cast<double>(mask->size()));

    // random masks and fields
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto grid = trial % 2 ? GridSpec::volume(5, 4, 3) : GridSpec::planar(7, 6);
        std::vector<std::uint8_t> inside(grid.cell_count());
        for (auto& b : inside) b = static_cast<std::uint8_t>(rng() % 2);
        inside[0] = 1;
        const auto m = share(RegionMask(grid, inside));
        const ImageField f(m, testing::uniform_vector(m->size(), -3, 3, rng()));
        const ImageField back = extract(embed(f), m);
        CHECK(testing::bitwise_equal(back.values, f.values));
    }
}

TEST_CASE("grid geometry") {
    const auto g = GridSpec::planar(4, 4);
    const auto c = g.cell_center(0, 0);
    CHECK(c[0] == doctest::Approx(-0.375));
    CHECK(c[1] == doctest::Approx(-0.375));
    CHECK(g.cell_volume() == doctest::Approx(1.0 / 16));
    const auto v = GridSpec::volume(2, 2, 4);
    CHECK(v.cell_center(1, 1, 3)[2] == doctest::Approx(0.875));
    CHECK(v.coords(v.flat(1, 0, 2)) == std::array<int, 3>{1, 0, 2});

    CHECK_THROWS_AS(GridSpec::planar(0, 4).validate(), InvalidArgument);
    GridSpec bad = GridSpec::planar(4, 4);
    bad.ndim = 4;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("image field rejects bad values") {
    const auto mask = share(make_circular_mask(4));
    CHECK_THROWS_AS(ImageField(mask, std::vector<double>(3, 1.0)), InvalidArgument);
    std::vector<double> v(mask->size(), 1.0);
    v[2] = std::nan("");
    CHECK_THROWS_AS(ImageField(mask, v), InvalidArgument);
}
