#include "rsip/phantom.hpp"

#include <cmath>

#include "rsip/errors.hpp"

namespace rsip {

namespace {

struct KindInfo {
    ShapeKind kind;
    std::string_view name;
    std::size_t pose_len;
    std::size_t dims_len;
};

constexpr std::array<KindInfo, 6> kKinds{{
    {ShapeKind::triangle, "triangle", 6, 0},
    {ShapeKind::rectangle, "rectangle", 2, 2},
    {ShapeKind::cone, "cone", 3, 2},
    {ShapeKind::sphere, "sphere", 3, 1},
    {ShapeKind::cylinder, "cylinder", 3, 2},
    {ShapeKind::cuboid, "cuboid", 3, 3},
}};

const KindInfo& info(ShapeKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k;
    }
    throw InvalidArgument("unknown shape kind");
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

}  // namespace

std::string_view to_string(ShapeKind kind) { return info(kind).name; }

ShapeKind shape_kind_from_string(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name) return k.kind;
    }
    throw InvalidArgument("unknown shape kind '" + std::string(name) + "'");
}

void ShapePrimitive::validate() const {
    const KindInfo& k = info(kind);
    if (pose.size() != k.pose_len || dims.size() != k.dims_len) {
        throw InvalidArgument(std::string(k.name) + ": expected " + std::to_string(k.pose_len) +
                              " pose and " + std::to_string(k.dims_len) + " dims values");
    }
    for (double p : pose) {
        if (!std::isfinite(p)) throw InvalidArgument(std::string(k.name) + ": non-finite pose");
    }
    for (double d : dims) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw InvalidArgument(std::string(k.name) + ": dimensions must be > 0");
        }
    }
    if (kind == ShapeKind::triangle) {
        const double area2 = cross(pose[2] - pose[0], pose[3] - pose[1], pose[4] - pose[0], pose[5] - pose[1]);
        if (area2 == 0.0) throw InvalidArgument("triangle: degenerate vertices");
    }
}

bool ShapePrimitive::contains(const std::array<double, 3>& p) const {
    const double x = p[0];
    const double y = p[1];
    const double z = p[2];
    switch (kind) {
        case ShapeKind::triangle: {
            const double d1 = cross(pose[2] - pose[0], pose[3] - pose[1], x - pose[0], y - pose[1]);
            const double d2 = cross(pose[4] - pose[2], pose[5] - pose[3], x - pose[2], y - pose[3]);
            const double d3 = cross(pose[0] - pose[4], pose[1] - pose[5], x - pose[4], y - pose[5]);
            const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
            const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
            return !(has_neg && has_pos);
        }
        case ShapeKind::rectangle:
            return std::abs(x - pose[0]) <= 0.5 * dims[0] && std::abs(y - pose[1]) <= 0.5 * dims[1];
        case ShapeKind::sphere: {
            const double dx = x - pose[0], dy = y - pose[1], dz = z - pose[2];
            return dx * dx + dy * dy + dz * dz <= dims[0] * dims[0];
        }
        case ShapeKind::cylinder: {
            const double dx = x - pose[0], dy = y - pose[1];
            return z >= pose[2] && z <= pose[2] + dims[1] && dx * dx + dy * dy <= dims[0] * dims[0];
        }
        case ShapeKind::cone: {
            const double t = (z - pose[2]) / dims[1];
            if (t < 0.0 || t > 1.0) return false;
            const double r = t * dims[0];
            const double dx = x - pose[0], dy = y - pose[1];
            return dx * dx + dy * dy <= r * r;
        }
        case ShapeKind::cuboid:
            return std::abs(x - pose[0]) <= 0.5 * dims[0] && std::abs(y - pose[1]) <= 0.5 * dims[1] &&
                   std::abs(z - pose[2]) <= 0.5 * dims[2];
    }
    return false;
}

void PhantomSpec::validate() const {
    if (!(background > 0.0) || !std::isfinite(background)) {
        throw InvalidArgument("phantom: background conductivity must be > 0");
    }
    for (const auto& inc : inclusions) {
        inc.shape.validate();
        if (!(inc.conductivity > 0.0) || !std::isfinite(inc.conductivity)) {
            throw InvalidArgument("phantom: inclusion conductivity must be > 0");
        }
    }
}

ImageField rasterize(const PhantomSpec& spec, MaskPtr mask) {
    spec.validate();
    const GridSpec& grid = mask->grid();
    std::vector<double> values(mask->size(), spec.background);
    for (std::size_t n = 0; n < values.size(); ++n) {
        const auto [i, j, k] = grid.coords(mask->flat_of(n));
        const auto c = grid.cell_center(i, j, k);
        for (const auto& inc : spec.inclusions) {
            if (inc.shape.contains(c)) values[n] = inc.conductivity;
        }
    }
    return ImageField(std::move(mask), std::move(values));
}

// Geometry is in the default unit-diameter (and unit-height) domain.
PhantomSpec builtin_case(int id) {
    PhantomSpec s;
    s.background = 2.0;
    switch (id) {
        case 1:
            s.inclusions = {{{ShapeKind::triangle, {-0.22, -0.18, 0.22, -0.18, 0.0, 0.24}, {}}, 0.8}};
            break;
        case 2:
            s.inclusions = {
                {{ShapeKind::triangle, {-0.32, -0.14, 0.02, -0.14, -0.15, 0.22}, {}}, 0.4},
                {{ShapeKind::rectangle, {0.2, 0.0}, {0.1, 0.42}}, 1.2},
            };
            break;
        case 3:
            s.inclusions = {{{ShapeKind::cone, {0.0, 0.05, 0.2}, {0.2, 0.6}}, 1.0}};
            break;
        case 4:
            s.inclusions = {
                {{ShapeKind::cone, {-0.18, 0.02, 0.22}, {0.16, 0.56}}, 0.8},
                {{ShapeKind::cylinder, {0.2, 0.02, 0.2}, {0.11, 0.6}}, 1.2},
            };
            break;
        case 5:
            s.inclusions = {
                {{ShapeKind::cone, {-0.2, 0.1, 0.28}, {0.14, 0.48}}, 0.4},
                {{ShapeKind::sphere, {0.17, 0.14, 0.52}, {0.13}}, 1.0},
                {{ShapeKind::cuboid, {0.0, -0.22, 0.5}, {0.44, 0.08, 0.5}}, 1.2},
            };
            break;
        default:
            throw InvalidArgument("builtin phantom: case id must be in 1..5, got " + std::to_string(id));
    }
    return s;
}

int builtin_case_ndim(int id) {
    if (id < 1 || id > 5) throw InvalidArgument("builtin phantom: case id must be in 1..5");
    return id <= 2 ? 2 : 3;
}

PhantomSpec phantom_from_json(const nlohmann::json& doc) {
    PhantomSpec s;
    try {
        s.background = doc.at("background").get<double>();
        if (doc.contains("inclusions")) {
            for (const auto& item : doc.at("inclusions")) {
                Inclusion inc;
                inc.shape.kind = shape_kind_from_string(item.at("kind").get<std::string>());
                inc.shape.pose = item.at("pose").get<std::vector<double>>();
                inc.shape.dims = item.value("dims", std::vector<double>{});
                inc.conductivity = item.at("conductivity").get<double>();
                s.inclusions.push_back(std::move(inc));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("phantom JSON: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json phantom_to_json(const PhantomSpec& spec) {
    nlohmann::json doc;
    doc["background"] = spec.background;
    doc["inclusions"] = nlohmann::json::array();
    for (const auto& inc : spec.inclusions) {
        doc["inclusions"].push_back({{"kind", std::string(to_string(inc.shape.kind))},
                                     {"pose", inc.shape.pose},
                                     {"dims", inc.shape.dims},
                                     {"conductivity", inc.conductivity}});
    }
    return doc;
}

}  // namespace rsip
