#include "rsip/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rsip/errors.hpp"

namespace rsip::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
public:
    explicit Writer(std::string_view magic) { bytes_.insert(bytes_.end(), magic.begin(), magic.end()); }

    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) bytes_.push_back(static_cast<std::uint8_t>(v >> s));
    }
    void u64(std::uint64_t v) {
        for (int s = 0; s < 64; s += 8) bytes_.push_back(static_cast<std::uint8_t>(v >> s));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(std::span<const double> vs) {
        bytes_.reserve(bytes_.size() + 8 * vs.size());
        for (double v : vs) f64(v);
    }
    Bytes take() { return std::move(bytes_); }

private:
    Bytes bytes_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, std::string_view magic, std::string_view what)
        : bytes_(bytes), what_(what) {
        if (bytes_.size() < magic.size()) {
            throw IoError(IoError::Kind::truncated, std::string(what_) + ": file shorter than its magic");
        }
        if (std::memcmp(bytes_.data(), magic.data(), magic.size()) != 0) {
            throw IoError(IoError::Kind::bad_magic, std::string(what_) + ": bad magic, expected '" +
                                                        std::string(magic) + "'");
        }
        pos_ = magic.size();
    }

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int s = 0; s < 4; ++s) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * s);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int s = 0; s < 8; ++s) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * s);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::vector<double> f64s(std::size_t n) {
        need(8 * n);
        std::vector<double> out(n);
        for (double& v : out) v = f64();
        return out;
    }
    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    void finish() const {
        if (pos_ != bytes_.size()) {
            throw IoError(IoError::Kind::count_mismatch,
                          std::string(what_) + ": " + std::to_string(bytes_.size() - pos_) + " trailing bytes");
        }
    }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw IoError(IoError::Kind::truncated, std::string(what_) + ": truncated");
    }

    std::span<const std::uint8_t> bytes_;
    std::string_view what_;
    std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t n, const char* what) {
    if (n > 0xffffffffu) throw InvalidArgument(std::string(what) + ": dimension exceeds u32");
    return static_cast<std::uint32_t>(n);
}

}  // namespace

Bytes encode_matrix(const SensitivityMatrix& m) {
    if (m.data.size() != m.rows * m.cols) throw InvalidArgument("f64mat: data size mismatch");
    Writer w("F64M");
    w.u32(checked_u32(m.rows, "f64mat"));
    w.u32(checked_u32(m.cols, "f64mat"));
    w.f64s(m.data);
    return w.take();
}

SensitivityMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "F64M", "f64mat");
    SensitivityMatrix m;
    m.rows = r.u32();
    m.cols = r.u32();
    const std::size_t expect = m.rows * m.cols;
    if (bytes.size() - 12 != 8 * expect) {
        throw IoError(bytes.size() - 12 < 8 * expect ? IoError::Kind::truncated : IoError::Kind::count_mismatch,
                      "f64mat: payload does not match " + std::to_string(m.rows) + "x" + std::to_string(m.cols));
    }
    m.data = r.f64s(expect);
    r.finish();
    return m;
}

Bytes encode_vector(std::span<const double> v) {
    Writer w("F64V");
    w.u32(checked_u32(v.size(), "f64vec"));
    w.f64s(v);
    return w.take();
}

std::vector<double> decode_vector(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "F64V", "f64vec");
    const std::size_t n = r.u32();
    if (bytes.size() - 8 != 8 * n) {
        throw IoError(bytes.size() - 8 < 8 * n ? IoError::Kind::truncated : IoError::Kind::count_mismatch,
                      "f64vec: payload does not match length " + std::to_string(n));
    }
    auto v = r.f64s(n);
    r.finish();
    return v;
}

Bytes encode_image(const ImageField& field) {
    const GridSpec& g = field.grid();
    Writer w("EIMG");
    w.u8(static_cast<std::uint8_t>(g.ndim));
    w.u32(checked_u32(static_cast<std::size_t>(g.nx), "eimg"));
    w.u32(checked_u32(static_cast<std::size_t>(g.ny), "eimg"));
    if (g.ndim == 3) w.u32(checked_u32(static_cast<std::size_t>(g.nz), "eimg"));
    for (std::uint8_t b : field.mask->bytes()) w.u8(b);
    w.f64s(field.values);
    return w.take();
}

ImageField decode_image(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "EIMG", "eimg");
    const int ndim = r.u8();
    if (ndim != 2 && ndim != 3) throw IoError(IoError::Kind::count_mismatch, "eimg: ndim must be 2 or 3");
    const auto nx = static_cast<int>(r.u32());
    const auto ny = static_cast<int>(r.u32());
    const int nz = ndim == 3 ? static_cast<int>(r.u32()) : 1;
    if (nx < 1 || ny < 1 || nz < 1) throw IoError(IoError::Kind::count_mismatch, "eimg: zero dimension");
    const GridSpec grid = ndim == 2 ? GridSpec::planar(nx, ny) : GridSpec::volume(nx, ny, nz);
    const auto raw = r.raw(grid.cell_count());
    std::vector<std::uint8_t> inside(raw.begin(), raw.end());
    std::size_t n_inside = 0;
    for (std::uint8_t b : inside) {
        if (b > 1) throw IoError(IoError::Kind::count_mismatch, "eimg: mask bytes must be 0 or 1");
        n_inside += b;
    }
    auto values = r.f64s(n_inside);
    r.finish();
    return ImageField(share(RegionMask(grid, std::move(inside))), std::move(values));
}

Bytes encode_mlp(const MlpParams& params) {
    const MlpShape& s = params.shape();
    Writer w("MLPK");
    w.u32(checked_u32(s.inputs, "mlpk"));
    w.u32(checked_u32(s.hidden, "mlpk"));
    w.u32(checked_u32(s.outputs, "mlpk"));
    w.f64s(params.flat());
    return w.take();
}

MlpParams decode_mlp(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "MLPK", "mlpk");
    MlpShape s;
    s.inputs = r.u32();
    s.hidden = r.u32();
    s.outputs = r.u32();
    if (bytes.size() - 16 != 8 * s.parameter_count()) {
        throw IoError(bytes.size() - 16 < 8 * s.parameter_count() ? IoError::Kind::truncated
                                                                   : IoError::Kind::count_mismatch,
                      "mlpk: payload does not match the layer sizes");
    }
    auto flat = r.f64s(s.parameter_count());
    r.finish();
    return MlpParams(s, std::move(flat));
}

Bytes encode_adam(const AdamState& state) {
    if (state.m.size() != state.v.size()) throw InvalidArgument("adam: moment lengths differ");
    Writer w("ADAM");
    w.u64(state.step_count);
    w.f64(state.beta1);
    w.f64(state.beta2);
    w.f64(state.eps_hat);
    w.f64(state.lr);
    w.u32(checked_u32(state.m.size(), "adam"));
    w.f64s(state.m);
    w.f64s(state.v);
    return w.take();
}

AdamState decode_adam(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, "ADAM", "adam");
    AdamState s;
    s.step_count = r.u64();
    s.beta1 = r.f64();
    s.beta2 = r.f64();
    s.eps_hat = r.f64();
    s.lr = r.f64();
    const std::size_t n = r.u32();
    s.m = r.f64s(n);
    s.v = r.f64s(n);
    r.finish();
    return s;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::open_failed, "cannot open '" + path.string() + "'");
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoError::Kind::open_failed, "cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(IoError::Kind::open_failed, "write failed for '" + path.string() + "'");
}

void write_matrix(const std::filesystem::path& p, const SensitivityMatrix& m) { write_file(p, encode_matrix(m)); }
SensitivityMatrix read_matrix(const std::filesystem::path& p) { return decode_matrix(read_file(p)); }
void write_vector(const std::filesystem::path& p, std::span<const double> v) { write_file(p, encode_vector(v)); }
std::vector<double> read_vector(const std::filesystem::path& p) { return decode_vector(read_file(p)); }
void write_image(const std::filesystem::path& p, const ImageField& f) { write_file(p, encode_image(f)); }
ImageField read_image(const std::filesystem::path& p) { return decode_image(read_file(p)); }
void write_mlp(const std::filesystem::path& p, const MlpParams& m) { write_file(p, encode_mlp(m)); }
MlpParams read_mlp(const std::filesystem::path& p) { return decode_mlp(read_file(p)); }

// ---------------------------------------------------------------- rendering

Axis axis_from_string(const std::string& name) {
    if (name == "x") return Axis::x;
    if (name == "y") return Axis::y;
    if (name == "z") return Axis::z;
    throw InvalidArgument("axis must be x, y or z, got '" + name + "'");
}

namespace {

struct GrayMap {
    double lo;
    double hi;

    explicit GrayMap(const ImageField& f) {
        const auto [mn, mx] = std::minmax_element(f.values.begin(), f.values.end());
        lo = *mn;
        hi = *mx;
    }
    std::uint8_t operator()(double v) const {
        if (!(hi > lo)) return 255;
        const double t = (v - lo) / (hi - lo);
        return static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
};

}  // namespace

Gray8 render_image(const ImageField& field) {
    const GridSpec& g = field.grid();
    if (g.ndim != 2) throw InvalidArgument("render_image: field is not planar; use render_slice");
    const GrayMap map(field);
    Gray8 img{g.nx, g.ny, std::vector<std::uint8_t>(static_cast<std::size_t>(g.nx) * g.ny, kOutsideGray)};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::int64_t idx = field.mask->index_at(i, j, 0);
            if (idx >= 0) img.pixels[static_cast<std::size_t>(g.ny - 1 - j) * g.nx + i] = map(field.values[idx]);
        }
    }
    return img;
}

Gray8 render_slice(const ImageField& field, Axis axis, int index) {
    const GridSpec& g = field.grid();
    if (g.ndim != 3) throw InvalidArgument("render_slice: planar fields have no slices; use render_image");
    const int limit = axis == Axis::x ? g.nx : axis == Axis::y ? g.ny : g.nz;
    if (index < 0 || index >= limit) {
        throw InvalidArgument("render_slice: index " + std::to_string(index) + " outside [0, " +
                              std::to_string(limit) + ")");
    }
    const GrayMap map(field);
    // (width axis, height axis) of the slice image; height grows upward.
    const int w = axis == Axis::z ? g.nx : axis == Axis::x ? g.ny : g.nx;
    const int h = axis == Axis::z ? g.ny : g.nz;
    Gray8 img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, kOutsideGray)};
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            std::int64_t idx = -1;
            switch (axis) {
                case Axis::z: idx = field.mask->index_at(u, v, index); break;
                case Axis::x: idx = field.mask->index_at(index, u, v); break;
                case Axis::y: idx = field.mask->index_at(u, index, v); break;
            }
            if (idx >= 0) img.pixels[static_cast<std::size_t>(h - 1 - v) * w + u] = map(field.values[idx]);
        }
    }
    return img;
}

Bytes encode_pgm(const Gray8& image) {
    const std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    Bytes out(header.begin(), header.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

void write_pgm(const std::filesystem::path& path, const Gray8& image) { write_file(path, encode_pgm(image)); }

void write_voxel_list(const std::filesystem::path& path, const ImageField& field, double threshold) {
    std::ostringstream csv;
    csv << "i,j,k,value\n" << std::setprecision(17);
    const GridSpec& g = field.grid();
    for (std::size_t n = 0; n < field.size(); ++n) {
        if (std::abs(field.values[n]) < threshold) continue;
        const auto [i, j, k] = g.coords(field.mask->flat_of(n));
        csv << i << ',' << j << ',' << k << ',' << field.values[n] << '\n';
    }
    const std::string s = csv.str();
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace rsip::io
