#include "rsip/grid.hpp"

#include <cmath>
#include <string>

#include "rsip/errors.hpp"

namespace rsip {

GridSpec GridSpec::planar(int nx, int ny, double width, double height) {
    GridSpec g;
    g.ndim = 2;
    g.nx = nx;
    g.ny = ny;
    g.nz = 1;
    g.extent = {width, height, 1.0};
    g.validate();
    return g;
}

GridSpec GridSpec::volume(int nx, int ny, int nz, std::array<double, 3> extent) {
    GridSpec g;
    g.ndim = 3;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.extent = extent;
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (ndim != 2 && ndim != 3) throw InvalidArgument("grid: ndim must be 2 or 3");
    if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("grid: cell counts must be positive");
    if (ndim == 2 && nz != 1) throw InvalidArgument("grid: planar grids have nz = 1");
    for (double e : extent) {
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("grid: extents must be finite and > 0");
    }
}

std::array<int, 3> GridSpec::coords(std::size_t flat) const {
    const auto sx = static_cast<std::size_t>(nx);
    const auto sy = static_cast<std::size_t>(ny);
    return {static_cast<int>(flat % sx), static_cast<int>((flat / sx) % sy),
            static_cast<int>(flat / (sx * sy))};
}

std::array<double, 3> GridSpec::spacing() const {
    return {extent[0] / nx, extent[1] / ny, extent[2] / nz};
}

std::array<double, 3> GridSpec::cell_center(int i, int j, int k) const {
    const auto h = spacing();
    return {(i + 0.5) * h[0] - 0.5 * extent[0], (j + 0.5) * h[1] - 0.5 * extent[1],
            (k + 0.5) * h[2]};
}

double GridSpec::cell_volume() const {
    const auto h = spacing();
    return ndim == 2 ? h[0] * h[1] : h[0] * h[1] * h[2];
}

RegionMask::RegionMask(GridSpec grid, std::vector<std::uint8_t> inside)
    : grid_(grid), inside_(std::move(inside)) {
    grid_.validate();
    if (inside_.size() != grid_.cell_count()) {
        throw InvalidArgument("mask: expected " + std::to_string(grid_.cell_count()) +
                              " cells, got " + std::to_string(inside_.size()));
    }
    to_region_.assign(inside_.size(), -1);
    for (std::size_t f = 0; f < inside_.size(); ++f) {
        if (inside_[f] > 1) throw InvalidArgument("mask: cell flags must be 0 or 1");
        if (inside_[f]) {
            to_region_[f] = static_cast<std::int64_t>(to_flat_.size());
            to_flat_.push_back(f);
        }
    }
    if (to_flat_.empty()) throw InvalidArgument("mask: region is empty");
}

bool RegionMask::inside(int i, int j, int k) const {
    return index_at(i, j, k) >= 0;
}

std::int64_t RegionMask::index_at(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= grid_.nx || j >= grid_.ny || k >= grid_.nz) return -1;
    return to_region_[grid_.flat(i, j, k)];
}

ImageField::ImageField(MaskPtr m, std::vector<double> v) : mask(std::move(m)), values(std::move(v)) {
    if (!mask) throw InvalidArgument("field: null mask");
    if (values.size() != mask->size()) {
        throw InvalidArgument("field: " + std::to_string(values.size()) + " values for " +
                              std::to_string(mask->size()) + " region cells");
    }
    for (double x : values) {
        if (!std::isfinite(x)) throw InvalidArgument("field: non-finite value");
    }
}

ImageField ImageField::filled(MaskPtr mask, double value) {
    const std::size_t n = mask ? mask->size() : 0;
    return ImageField(std::move(mask), std::vector<double>(n, value));
}

namespace {

RegionMask ellipse_mask(int nx, int ny, int nz, int ndim) {
    if (nx < 1 || ny < 1 || nz < 1) throw InvalidArgument("mask: cell counts must be positive");
    GridSpec grid = ndim == 2 ? GridSpec::planar(nx, ny) : GridSpec::volume(nx, ny, nz);
    std::vector<std::uint8_t> inside(grid.cell_count(), 0);
    const double rx = 0.5 * nx;
    const double ry = 0.5 * ny;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double dx = (i + 0.5 - rx) / rx;
                const double dy = (j + 0.5 - ry) / ry;
                if (dx * dx + dy * dy <= 1.0) inside[grid.flat(i, j, k)] = 1;
            }
        }
    }
    return RegionMask(grid, std::move(inside));
}

}  // namespace

RegionMask make_circular_mask(int n) {
    return ellipse_mask(n, n, 1, 2);
}

RegionMask make_cylindrical_mask(int nx, int ny, int nz) {
    return ellipse_mask(nx, ny, nz, 3);
}

double polygon_area(std::span<const Point2> polygon) {
    double twice = 0.0;
    for (std::size_t a = 0; a < polygon.size(); ++a) {
        const Point2& p = polygon[a];
        const Point2& q = polygon[(a + 1) % polygon.size()];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

bool point_in_polygon(std::span<const Point2> polygon, Point2 p) {
    bool in = false;
    for (std::size_t a = 0, b = polygon.size() - 1; a < polygon.size(); b = a++) {
        const Point2& pa = polygon[a];
        const Point2& pb = polygon[b];
        if ((pa.y > p.y) != (pb.y > p.y)) {
            const double x_cross = pb.x + (p.y - pb.y) * (pa.x - pb.x) / (pa.y - pb.y);
            if (p.x < x_cross) in = !in;
        }
    }
    return in;
}

RegionMask make_polygon_mask(const GridSpec& grid, std::span<const Point2> boundary) {
    grid.validate();
    if (boundary.size() < 3) throw InvalidArgument("polygon mask: need at least 3 vertices");
    const double area = polygon_area(boundary);
    if (!(std::abs(area) > 1e-14 * grid.extent[0] * grid.extent[1])) {
        throw InvalidArgument("polygon mask: degenerate polygon (zero area)");
    }
    std::vector<std::uint8_t> inside(grid.cell_count(), 0);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const auto c = grid.cell_center(i, j, 0);
            if (!point_in_polygon(boundary, {c[0], c[1]})) continue;
            for (int k = 0; k < grid.nz; ++k) inside[grid.flat(i, j, k)] = 1;
        }
    }
    return RegionMask(grid, std::move(inside));
}

RegionMask make_full_mask(const GridSpec& grid) {
    return RegionMask(grid, std::vector<std::uint8_t>(grid.cell_count(), 1));
}

std::vector<double> embed(const ImageField& field) {
    const RegionMask& mask = *field.mask;
    std::vector<double> full(mask.grid().cell_count(), 0.0);
    for (std::size_t n = 0; n < mask.size(); ++n) full[mask.flat_of(n)] = field.values[n];
    return full;
}

ImageField extract(std::span<const double> full, MaskPtr mask) {
    if (!mask) throw InvalidArgument("extract: null mask");
    if (full.size() != mask->grid().cell_count()) {
        throw InvalidArgument("extract: array has " + std::to_string(full.size()) +
                              " cells, grid has " + std::to_string(mask->grid().cell_count()));
    }
    std::vector<double> values(mask->size());
    for (std::size_t n = 0; n < values.size(); ++n) values[n] = full[mask->flat_of(n)];
    return ImageField(std::move(mask), std::move(values));
}

}  // namespace rsip
