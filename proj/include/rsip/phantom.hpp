#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsip/grid.hpp"

namespace rsip {

enum class ShapeKind { triangle, rectangle, cone, sphere, cylinder, cuboid };

std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

/// Geometric inclusion in physical coordinates (see GridSpec).
///
/// pose/dims layout per kind:
///   triangle   pose = {x1, y1, x2, y2, x3, y3}        dims = {}
///   rectangle  pose = {cx, cy}                         dims = {width, height}
///   sphere     pose = {cx, cy, cz}                     dims = {radius}
///   cylinder   pose = {cx, cy, z_bottom}               dims = {radius, height}
///   cone       pose = {cx, cy, z_apex}                 dims = {base_radius, height}
///   cuboid     pose = {cx, cy, cz}                     dims = {wx, wy, wz}
/// The planar kinds are extruded over z when rasterized on a volume. A cone
/// has its apex at the bottom and its base height units above it.
struct ShapePrimitive {
    ShapeKind kind = ShapeKind::sphere;
    std::vector<double> pose;
    std::vector<double> dims;

    void validate() const;
    bool contains(const std::array<double, 3>& p) const;
};

struct Inclusion {
    ShapePrimitive shape;
    double conductivity = 1.0;
};

struct PhantomSpec {
    double background = 2.0;
    std::vector<Inclusion> inclusions;

    void validate() const;
};

/// Each region cell takes the conductivity of the last inclusion containing
/// its center, else the background.
ImageField rasterize(const PhantomSpec& spec, MaskPtr mask);

/// Simulation cases 1-5 (1, 2 planar; 3-5 cylindrical). The conductivities
/// are the published ones; the shapes are fixed approximations.
PhantomSpec builtin_case(int id);
/// Spatial dimension a builtin case is defined on.
int builtin_case_ndim(int id);

PhantomSpec phantom_from_json(const nlohmann::json& doc);
nlohmann::json phantom_to_json(const PhantomSpec& spec);

}  // namespace rsip
