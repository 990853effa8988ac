#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace rsip {

/// Regular cell grid over the imaging domain.
///
/// Physical coordinates put the x/y origin at the grid center and z = 0 at
/// the bottom face, so a default 2D grid spans [-0.5, 0.5]^2 and a default
/// 3D grid spans [-0.5, 0.5]^2 x [0, 1]. Flat indices scan x fastest, then
/// y, then z.
struct GridSpec {
    int ndim = 2;
    int nx = 1;
    int ny = 1;
    int nz = 1;
    std::array<double, 3> extent{1.0, 1.0, 1.0};

    static GridSpec planar(int nx, int ny, double width = 1.0, double height = 1.0);
    static GridSpec volume(int nx, int ny, int nz, std::array<double, 3> extent = {1.0, 1.0, 1.0});

    /// Throws InvalidArgument unless ndim is 2 or 3, counts are positive and extents finite > 0.
    void validate() const;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    std::size_t flat(int i, int j, int k = 0) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
    }
    std::array<int, 3> coords(std::size_t flat) const;
    std::array<double, 3> spacing() const;
    std::array<double, 3> cell_center(int i, int j, int k = 0) const;
    double cell_volume() const;

    bool operator==(const GridSpec&) const = default;
};

/// The set of grid cells that belong to the imaging region, plus the
/// bijection between those cells and the compact indices 0..N-1.
class RegionMask {
public:
    RegionMask(GridSpec grid, std::vector<std::uint8_t> inside);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return to_flat_.size(); }
    bool inside(std::size_t flat) const noexcept { return inside_[flat] != 0; }
    bool inside(int i, int j, int k) const;
    std::span<const std::uint8_t> bytes() const noexcept { return inside_; }

    /// Flat grid index of region cell n.
    std::size_t flat_of(std::size_t n) const noexcept { return to_flat_[n]; }
    /// Region index of a flat grid cell, or -1 when the cell is outside.
    std::int64_t index_of(std::size_t flat) const noexcept { return to_region_[flat]; }
    /// Region index of (i, j, k), or -1 when outside or off-grid.
    std::int64_t index_at(int i, int j, int k) const;

    bool operator==(const RegionMask& other) const {
        return grid_ == other.grid_ && inside_ == other.inside_;
    }

private:
    GridSpec grid_;
    std::vector<std::uint8_t> inside_;
    std::vector<std::size_t> to_flat_;
    std::vector<std::int64_t> to_region_;
};

using MaskPtr = std::shared_ptr<const RegionMask>;

inline MaskPtr share(RegionMask mask) {
    return std::make_shared<const RegionMask>(std::move(mask));
}

/// Values on the in-region cells of a mask, in region-index order.
struct ImageField {
    MaskPtr mask;
    std::vector<double> values;

    ImageField(MaskPtr mask, std::vector<double> values);
    /// Constant field over the mask.
    static ImageField filled(MaskPtr mask, double value);

    const GridSpec& grid() const { return mask->grid(); }
    std::size_t size() const { return values.size(); }
};

struct Point2 {
    double x;
    double y;
};

/// n x n planar disk: a cell is inside iff its center is within n/2 cells of
/// the grid center (ties count as inside).
RegionMask make_circular_mask(int n);
/// The same disk test (ellipse when nx != ny) repeated on every z-slice.
RegionMask make_cylindrical_mask(int nx, int ny, int nz);
/// Cells whose center lies inside a simple polygon given in physical x/y
/// coordinates, repeated on every z-slice. Zero-area polygons are rejected.
RegionMask make_polygon_mask(const GridSpec& grid, std::span<const Point2> boundary);
/// Every cell of the grid.
RegionMask make_full_mask(const GridSpec& grid);

/// Crossing-number point-in-polygon test.
bool point_in_polygon(std::span<const Point2> polygon, Point2 p);
double polygon_area(std::span<const Point2> polygon);

/// Scatter the region values into a full grid array, zero outside.
std::vector<double> embed(const ImageField& field);
/// Gather the in-region cells of a full grid array.
ImageField extract(std::span<const double> full, MaskPtr mask);

}  // namespace rsip
