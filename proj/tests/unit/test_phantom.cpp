#include <doctest.h>

#include <set>

#include "rsip/errors.hpp"
#include "rsip/phantom.hpp"

using namespace rsip;

namespace {

std::set<double> value_set(const ImageField& f) { return {f.values.begin(), f.values.end()}; }

MaskPtr mask_for(int ndim) {
    return share(ndim == 2 ? make_circular_mask(64) : make_cylindrical_mask(16, 16, 20));
}

}  // namespace

TEST_CASE("empty phantom is the background") {
    PhantomSpec s;
    s.background = 2.0;
    const auto f = rasterize(s, share(make_circular_mask(16)));
    CHECK(value_set(f) == std::set<double>{2.0});
}

TEST_CASE("case 1 rasterizes to exactly two values") {
    const auto f = rasterize(builtin_case(1), mask_for(2));
    CHECK(value_set(f) == std::set<double>{0.8, 2.0});
}

TEST_CASE("sphere of radius 3 cells matches brute-force enumeration") {
    // extent equal to the cell counts makes physical units cell units
    const auto grid = GridSpec::volume(12, 12, 12, {12.0, 12.0, 12.0});
    const auto mask = share(make_full_mask(grid));
    PhantomSpec s;
    s.background = 2.0;
    s.inclusions = {{{ShapeKind::sphere, {0.0, 0.0, 6.0}, {3.0}}, 1.0}};
    const auto f = rasterize(s, mask);

    std::size_t expected = 0;
    for (int k = 0; k < 12; ++k) {
        for (int j = 0; j < 12; ++j) {
            for (int i = 0; i < 12; ++i) {
                const double dx = i + 0.5 - 6.0, dy = j + 0.5 - 6.0, dz = k + 0.5 - 6.0;
                if (dx * dx + dy * dy + dz * dz <= 9.0) ++expected;
            }
        }
    }
    std::size_t got = 0;
    for (double v : f.values) got += v == 1.0;
    CHECK(got == expected);
    CHECK(expected > 0);
}

TEST_CASE("builtin cases carry the published conductivities") {
    const auto c1 = builtin_case(1);
    CHECK(c1.background == 2.0);
    REQUIRE(c1.inclusions.size() == 1);
    CHECK(c1.inclusions[0].shape.kind == ShapeKind::triangle);
    CHECK(c1.inclusions[0].conductivity == 0.8);

    const auto c4 = builtin_case(4);
    REQUIRE(c4.inclusions.size() == 2);
    CHECK(c4.inclusions[0].shape.kind == ShapeKind::cone);
    CHECK(c4.inclusions[0].conductivity == 0.8);
    CHECK(c4.inclusions[1].shape.kind == ShapeKind::cylinder);
    CHECK(c4.inclusions[1].conductivity == 1.2);

    const auto c5 = builtin_case(5);
    REQUIRE(c5.inclusions.size() == 3);
    CHECK(c5.inclusions[0].shape.kind == ShapeKind::cone);
    CHECK(c5.inclusions[0].conductivity == 0.4);
    CHECK(c5.inclusions[1].shape.kind == ShapeKind::sphere);
    CHECK(c5.inclusions[1].conductivity == 1.0);
    CHECK(c5.inclusions[2].shape.kind == ShapeKind::cuboid);
    CHECK(c5.inclusions[2].conductivity == 1.2);

    CHECK_THROWS_AS(builtin_case(0), InvalidArgument);
    CHECK_THROWS_AS(builtin_case(6), InvalidArgument);
}

TEST_CASE("builtin cases stay below the background and keep a closed value set") {
    for (int id = 1; id <= 5; ++id) {
        const auto spec = builtin_case(id);
        std::set<double> allowed{spec.background};
        for (const auto& inc : spec.inclusions) {
            CHECK(inc.conductivity < spec.background);
            allowed.insert(inc.conductivity);
        }
        const auto f = rasterize(spec, mask_for(builtin_case_ndim(id)));
        const auto got = value_set(f);
        // every inclusion is visible on the grid
        CHECK(got == allowed);
    }
}

TEST_CASE("overlapping inclusions resolve to the last one") {
    PhantomSpec s;
    s.background = 2.0;
    s.inclusions = {{{ShapeKind::rectangle, {0.0, 0.0}, {0.6, 0.6}}, 1.0},
                    {{ShapeKind::rectangle, {0.0, 0.0}, {0.2, 0.2}}, 0.5}};
    const auto mask = share(make_circular_mask(20));
    const auto f = rasterize(s, mask);
    const auto center = mask->index_at(10, 10, 0);
    REQUIRE(center >= 0);
    CHECK(f.values[center] == 0.5);
    const auto ring = mask->index_at(14, 10, 0);
    REQUIRE(ring >= 0);
    CHECK(f.values[ring] == 1.0);
}

TEST_CASE("cone is narrow at the apex and wide at the base") {
    ShapePrimitive cone{ShapeKind::cone, {0.0, 0.0, 0.2}, {0.2, 0.6}};
    CHECK(cone.contains({0.0, 0.0, 0.21}));
    CHECK_FALSE(cone.contains({0.1, 0.0, 0.25}));
    CHECK(cone.contains({0.18, 0.0, 0.79}));
    CHECK_FALSE(cone.contains({0.0, 0.0, 0.81}));
    CHECK_FALSE(cone.contains({0.0, 0.0, 0.19}));
}

TEST_CASE("invalid phantoms are rejected") {
    PhantomSpec s;
    s.background = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s.background = 2.0;
    s.inclusions = {{{ShapeKind::sphere, {0.0, 0.0, 0.5}, {-0.1}}, 1.0}};
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s.inclusions = {{{ShapeKind::sphere, {0.0, 0.0, 0.5}, {0.1}}, 0.0}};
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("phantom JSON round trip") {
    for (int id = 1; id <= 5; ++id) {
        const auto spec = builtin_case(id);
        const auto back = phantom_from_json(phantom_to_json(spec));
        CHECK(back.background == spec.background);
        REQUIRE(back.inclusions.size() == spec.inclusions.size());
        for (std::size_t i = 0; i < spec.inclusions.size(); ++i) {
            CHECK(back.inclusions[i].shape.kind == spec.inclusions[i].shape.kind);
            CHECK(back.inclusions[i].shape.pose == spec.inclusions[i].shape.pose);
            CHECK(back.inclusions[i].shape.dims == spec.inclusions[i].shape.dims);
            CHECK(back.inclusions[i].conductivity == spec.inclusions[i].conductivity);
        }
    }
    CHECK_THROWS_AS(phantom_from_json(nlohmann::json::parse(R"({"inclusions": []})")), InvalidArgument);
    CHECK_THROWS_AS(phantom_from_json(nlohmann::json::parse(
                        R"({"background": 2, "inclusions": [{"kind": "blob", "pose": [0], "conductivity": 1}]})")),
                    InvalidArgument);
}
