#pragma once

// Binary containers (all little-endian):
//
//   .f64mat  "F64M" | rows u32 | cols u32 | rows*cols f64, row-major
//   .f64vec  "F64V" | len u32 | len f64
//   .eimg    "EIMG" | ndim u8 | ndim x u32 dims (nx, ny[, nz])
//            | one u8 (0/1) per grid cell, x fastest | f64 per region cell
//   .mlpk    "MLPK" | G u32 | H u32 | N u32 | w1, b1, w2, b2 as f64
//   .adam    "ADAM" | step u64 | beta1, beta2, eps, lr f64 | len u32 | m, v f64

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rsip/grid.hpp"
#include "rsip/mlp.hpp"
#include "rsip/optim.hpp"
#include "rsip/sensing.hpp"

namespace rsip::io {

using Bytes = std::vector<std::uint8_t>;

Bytes encode_matrix(const SensitivityMatrix& m);
SensitivityMatrix decode_matrix(std::span<const std::uint8_t> bytes);

Bytes encode_vector(std::span<const double> v);
std::vector<double> decode_vector(std::span<const std::uint8_t> bytes);

Bytes encode_image(const ImageField& field);
ImageField decode_image(std::span<const std::uint8_t> bytes);

Bytes encode_mlp(const MlpParams& params);
MlpParams decode_mlp(std::span<const std::uint8_t> bytes);

Bytes encode_adam(const AdamState& state);
AdamState decode_adam(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

void write_matrix(const std::filesystem::path& path, const SensitivityMatrix& m);
SensitivityMatrix read_matrix(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, std::span<const double> v);
std::vector<double> read_vector(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ImageField& field);
ImageField read_image(const std::filesystem::path& path);
void write_mlp(const std::filesystem::path& path, const MlpParams& params);
MlpParams read_mlp(const std::filesystem::path& path);

/// 8-bit grayscale raster, row 0 at the top.
struct Gray8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

enum class Axis { x, y, z };
Axis axis_from_string(const std::string& name);

inline constexpr std::uint8_t kOutsideGray = 128;

/// Planar field as an image (y up). Region values map linearly from
/// [min, max] to [0, 255]; a constant field maps to 255. Cells outside
/// the region are kOutsideGray.
Gray8 render_image(const ImageField& field);
/// Slice of a volume normal to `axis` at cell `index`, same gray mapping
/// over the whole volume. Throws InvalidArgument for planar fields or an
/// out-of-range index.
Gray8 render_slice(const ImageField& field, Axis axis, int index);

Bytes encode_pgm(const Gray8& image);
void write_pgm(const std::filesystem::path& path, const Gray8& image);

/// CSV "i,j,k,value" of region cells with |value| >= threshold.
void write_voxel_list(const std::filesystem::path& path, const ImageField& field, double threshold);

}  // namespace rsip::io
