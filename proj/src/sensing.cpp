#include "rsip/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <tuple>

#include "rsip/errors.hpp"
#include "rsip/kernels.hpp"

namespace rsip {

// ---------------------------------------------------------------- electrodes

namespace {

bool on_boundary(const RegionMask& mask, int i, int j, int k) {
    return mask.index_at(i - 1, j, k) < 0 || mask.index_at(i + 1, j, k) < 0 ||
           mask.index_at(i, j - 1, k) < 0 || mask.index_at(i, j + 1, k) < 0;
}

}  // namespace

ElectrodeLayout ElectrodeLayout::ring(const RegionMask& mask, int n_per_layer, int n_layers) {
    const GridSpec& g = mask.grid();
    if (n_per_layer < 3) throw InvalidArgument("electrodes: need at least 3 per layer");
    if (n_layers < 1 || n_layers > 2) throw InvalidArgument("electrodes: 1 or 2 layers supported");
    if (n_layers == 2 && g.ndim != 3) throw InvalidArgument("electrodes: two layers need a volume grid");

    std::vector<int> slices;
    if (n_layers == 1) {
        slices = {g.nz / 2};
    } else {
        slices = {g.nz / 4, g.nz - 1 - g.nz / 4};
        if (slices[0] == slices[1]) throw InvalidArgument("electrodes: grid too thin for two layers");
    }

    ElectrodeLayout layout;
    layout.n_per_layer = n_per_layer;
    layout.n_layers = n_layers;
    const double cx = 0.5 * g.nx;
    const double cy = 0.5 * g.ny;
    for (int k : slices) {
        for (int e = 0; e < n_per_layer; ++e) {
            // Half-spacing offset keeps the ideal points off cell edges.
            const double theta = 2.0 * std::numbers::pi * (e + 0.5) / n_per_layer;
            const double px = cx + cx * std::cos(theta);
            const double py = cy + cy * std::sin(theta);
            double best = std::numeric_limits<double>::infinity();
            std::int64_t best_idx = -1;
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    const std::int64_t idx = mask.index_at(i, j, k);
                    if (idx < 0 || !on_boundary(mask, i, j, k)) continue;
                    const double dx = i + 0.5 - px;
                    const double dy = j + 0.5 - py;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < best) {
                        best = d2;
                        best_idx = idx;
                    }
                }
            }
            if (best_idx < 0) throw InvalidArgument("electrodes: electrode slice has no region cells");
            layout.cells.push_back(static_cast<std::size_t>(best_idx));
        }
    }
    std::vector<std::size_t> sorted = layout.cells;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("electrodes: grid too coarse, two electrodes share a cell");
    }
    return layout;
}

ElectrodeLayout default_layout(const RegionMask& mask) {
    return ElectrodeLayout::ring(mask, 16, mask.grid().ndim == 3 ? 2 : 1);
}

// ---------------------------------------------------------------- protocols

void Protocol::validate(int n_electrodes) const {
    std::set<std::tuple<int, int, int, int>> seen;
    for (const auto& m : entries) {
        for (int id : {m.drive_pos, m.drive_neg, m.meas_pos, m.meas_neg}) {
            if (id < 0 || id >= n_electrodes) throw InvalidArgument("protocol: electrode id out of range");
        }
        if (m.drive_pos == m.drive_neg || m.meas_pos == m.meas_neg) {
            throw InvalidArgument("protocol: pair uses the same electrode twice");
        }
        for (int d : {m.drive_pos, m.drive_neg}) {
            if (d == m.meas_pos || d == m.meas_neg) {
                throw InvalidArgument("protocol: drive and measurement pairs overlap");
            }
        }
        if (!seen.emplace(m.drive_pos, m.drive_neg, m.meas_pos, m.meas_neg).second) {
            throw InvalidArgument("protocol: duplicate entry");
        }
    }
}

Protocol adjacent_protocol(int n, int first, bool reciprocal_only) {
    if (n < 4) throw InvalidArgument("adjacent protocol: need at least 4 electrodes");
    Protocol p;
    for (int d = 0; d < n; ++d) {
        const int d1 = (d + 1) % n;
        for (int m = 0; m < n; ++m) {
            const int m1 = (m + 1) % n;
            if (m == d || m == d1 || m1 == d || m1 == d1) continue;
            if (reciprocal_only && m <= d) continue;
            p.entries.push_back({first + d, first + d1, first + m, first + m1});
        }
    }
    return p;
}

Protocol cross_layer_protocol(int n_per_layer) {
    if (n_per_layer < 2) throw InvalidArgument("cross-layer protocol: need two layers of at least 2 electrodes");
    Protocol p;
    for (int i = 0; i < n_per_layer; ++i) {
        for (int j = i + 1; j < n_per_layer; ++j) {
            p.entries.push_back({i, i + n_per_layer, j, j + n_per_layer});
        }
    }
    return p;
}

Protocol combined_3d_protocol(int n_per_layer) {
    Protocol p = adjacent_protocol(n_per_layer, 0);
    const Protocol top = adjacent_protocol(n_per_layer, n_per_layer);
    const Protocol cross = cross_layer_protocol(n_per_layer);
    p.entries.insert(p.entries.end(), top.entries.begin(), top.entries.end());
    p.entries.insert(p.entries.end(), cross.entries.begin(), cross.entries.end());
    return p;
}

Protocol default_protocol(int ndim) {
    return ndim == 3 ? combined_3d_protocol(16) : adjacent_protocol(16);
}

// ---------------------------------------------------------------- network

ConductanceNetwork::ConductanceNetwork(const ImageField& sigma) : sigma_(sigma) {
    const RegionMask& mask = *sigma.mask;
    const GridSpec& g = mask.grid();
    for (double s : sigma.values) {
        if (!(s > 0.0)) throw InvalidArgument("forward model: conductivity must be positive");
    }
    const auto h = g.spacing();
    // face area / spacing per axis; planar grids have unit depth
    std::array<double, 3> geometry{};
    if (g.ndim == 2) {
        geometry = {h[1] / h[0], h[0] / h[1], 0.0};
    } else {
        geometry = {h[1] * h[2] / h[0], h[0] * h[2] / h[1], h[0] * h[1] / h[2]};
    }

    diagonal_.assign(mask.size(), 0.0);
    for (std::size_t n = 0; n < mask.size(); ++n) {
        const auto [i, j, k] = g.coords(mask.flat_of(n));
        const std::array<std::int64_t, 3> nb{mask.index_at(i + 1, j, k), mask.index_at(i, j + 1, k),
                                             g.ndim == 3 ? mask.index_at(i, j, k + 1) : -1};
        for (int axis = 0; axis < 3; ++axis) {
            if (nb[axis] < 0) continue;
            const auto m = static_cast<std::size_t>(nb[axis]);
            const double sa = sigma.values[n];
            const double sb = sigma.values[m];
            const double cond = geometry[axis] * 2.0 * sa * sb / (sa + sb);
            faces_.push_back({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), geometry[axis], cond});
            diagonal_[n] += cond;
            diagonal_[m] += cond;
        }
    }
}

void ConductanceNetwork::apply(std::span<const double> u, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Face& f : faces_) {
        const double flow = f.conductance * (u[f.a] - u[f.b]);
        out[f.a] += flow;
        out[f.b] -= flow;
    }
}

double ConductanceNetwork::relative_residual(std::span<const double> u, std::size_t source,
                                             std::size_t sink, double current) const {
    std::vector<double> r(nodes());
    apply(u, r);
    for (double& x : r) x = -x;
    r[source] += current;
    r[sink] -= current;
    return std::sqrt(kernels::serial::dot(r, r)) / (std::sqrt(2.0) * std::abs(current));
}

PotentialSolution ConductanceNetwork::solve(std::size_t source, std::size_t sink, double current,
                                            const SolverOptions& opts) const {
    const std::size_t n = nodes();
    if (source >= n || sink >= n || source == sink) {
        throw InvalidArgument("forward model: invalid source/sink cells");
    }
    if (current == 0.0) return {std::vector<double>(n, 0.0), 0, 0.0};

    const double b_norm = std::sqrt(2.0) * std::abs(current);
    const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(20 * n + 200);

    std::vector<double> u(n, 0.0), r(n, 0.0), z(n), p(n), q(n);
    r[source] = current;
    r[sink] = -current;

    PotentialSolution sol;
    int total = 0;
    // Restart from the true residual until it meets the tolerance.
    for (int restart = 0; restart < 8; ++restart) {
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diagonal_[k];
        p = z;
        double rz = kernels::serial::dot(r, z);
        while (total < max_iter) {
            if (std::sqrt(kernels::serial::dot(r, r)) <= 0.25 * opts.rel_tol * b_norm) break;
            apply(p, q);
            const double pq = kernels::serial::dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            for (std::size_t k = 0; k < n; ++k) {
                u[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diagonal_[k];
            const double rz_next = kernels::serial::dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
            ++total;
        }
        // Fix the gauge and recompute the true residual.
        double mean = 0.0;
        for (double x : u) mean += x;
        mean /= static_cast<double>(n);
        for (double& x : u) x -= mean;
        apply(u, r);
        for (double& x : r) x = -x;
        r[source] += current;
        r[sink] -= current;
        const double rel = std::sqrt(kernels::serial::dot(r, r)) / b_norm;
        if (rel <= opts.rel_tol) {
            sol.u = std::move(u);
            sol.iterations = total;
            sol.relative_residual = rel;
            return sol;
        }
        if (total >= max_iter) break;
    }
    throw NumericalError("forward model: conjugate gradients did not reach relative residual " +
                         std::to_string(opts.rel_tol) + " in " + std::to_string(total) + " iterations");
}

std::vector<double> solve_potential(const ImageField& sigma, std::size_t source, std::size_t sink,
                                    double current, const SolverOptions& opts) {
    const ConductanceNetwork net(sigma);
    PotentialSolution sol = net.solve(source, sink, current, opts);
    return embed(ImageField(sigma.mask, std::move(sol.u)));
}

// ---------------------------------------------------------------- pair cache

PairSolutions::PairSolutions(const ConductanceNetwork& network, const ElectrodeLayout& layout,
                             const Protocol& protocol, const SolverOptions& opts)
    : n_electrodes_(layout.size()) {
    protocol.validate(static_cast<int>(layout.size()));
    slot_.assign(n_electrodes_ * n_electrodes_, -1);
    std::vector<std::pair<int, int>> pairs;
    auto want = [&](int a, int b) {
        const std::size_t key = static_cast<std::size_t>(a) * n_electrodes_ + static_cast<std::size_t>(b);
        if (slot_[key] >= 0) return;
        slot_[key] = static_cast<std::int64_t>(pairs.size());
        pairs.emplace_back(a, b);
    };
    for (const auto& m : protocol.entries) {
        want(m.drive_pos, m.drive_neg);
        want(m.meas_pos, m.meas_neg);
    }

    solutions_.resize(pairs.size());
    std::vector<double> residuals(pairs.size(), 0.0);
    std::vector<std::string> failures(pairs.size());
    const auto count = static_cast<std::ptrdiff_t>(pairs.size());
    // Solves are independent; each slot is written by one iteration.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        try {
            const auto [a, b] = pairs[static_cast<std::size_t>(s)];
            PotentialSolution sol = network.solve(layout.cells[a], layout.cells[b], 1.0, opts);
            residuals[s] = sol.relative_residual;
            solutions_[s] = std::move(sol.u);
        } catch (const std::exception& e) {
            failures[s] = e.what();
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) throw NumericalError(f);
    }
    for (double r : residuals) worst_residual_ = std::max(worst_residual_, r);
}

std::span<const double> PairSolutions::get(int a, int b) const {
    const std::size_t key = static_cast<std::size_t>(a) * n_electrodes_ + static_cast<std::size_t>(b);
    if (a < 0 || b < 0 || key >= slot_.size() || slot_[key] < 0) {
        throw InvalidArgument("pair solutions: pair was not solved");
    }
    return solutions_[static_cast<std::size_t>(slot_[key])];
}

// ---------------------------------------------------------------- frames

VoltageFrame simulate_voltages(const ImageField& sigma, const ElectrodeLayout& layout,
                               const Protocol& protocol, const SolverOptions& opts) {
    const ConductanceNetwork net(sigma);
    protocol.validate(static_cast<int>(layout.size()));
    // Only drive pairs need solving here.
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::int64_t> slot(layout.size() * layout.size(), -1);
    for (const auto& m : protocol.entries) {
        const std::size_t key = static_cast<std::size_t>(m.drive_pos) * layout.size() + m.drive_neg;
        if (slot[key] < 0) {
            slot[key] = static_cast<std::int64_t>(pairs.size());
            pairs.emplace_back(m.drive_pos, m.drive_neg);
        }
    }
    std::vector<std::vector<double>> u(pairs.size());
    std::vector<std::string> failures(pairs.size());
    const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        try {
            const auto [a, b] = pairs[static_cast<std::size_t>(s)];
            u[s] = net.solve(layout.cells[a], layout.cells[b], 1.0, opts).u;
        } catch (const std::exception& e) {
            failures[s] = e.what();
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) throw NumericalError(f);
    }

    VoltageFrame frame;
    frame.kind = FrameKind::raw;
    frame.values.reserve(protocol.size());
    for (const auto& m : protocol.entries) {
        const auto& pot = u[static_cast<std::size_t>(slot[static_cast<std::size_t>(m.drive_pos) * layout.size() + m.drive_neg])];
        frame.values.push_back(pot[layout.cells[m.meas_pos]] - pot[layout.cells[m.meas_neg]]);
    }
    return frame;
}

namespace {

// Fills row `out` with S_m for one measurement.
void sensitivity_row(const ConductanceNetwork& net, std::span<const double> ud, std::span<const double> um,
                     std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const auto& s = net.sigma().values;
    for (const auto& f : net.faces()) {
        const double sa = s[f.a];
        const double sb = s[f.b];
        const double denom = (sa + sb) * (sa + sb);
        const double prod = (ud[f.a] - ud[f.b]) * (um[f.a] - um[f.b]);
        out[f.a] -= f.geometry * 2.0 * sb * sb / denom * prod;
        out[f.b] -= f.geometry * 2.0 * sa * sa / denom * prod;
    }
}

SensitivityMatrix assemble(const ImageField& reference, const ElectrodeLayout& layout,
                           const Protocol& protocol, const SolverOptions& opts, bool normalized) {
    const ConductanceNetwork net(reference);
    const PairSolutions pairs(net, layout, protocol, opts);
    SensitivityMatrix s(protocol.size(), reference.size());
    std::vector<std::string> failures(protocol.size());
    const auto rows = static_cast<std::ptrdiff_t>(protocol.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const Measurement& m = protocol.entries[static_cast<std::size_t>(r)];
        const auto ud = pairs.get(m.drive_pos, m.drive_neg);
        const auto um = pairs.get(m.meas_pos, m.meas_neg);
        auto out = s.row(static_cast<std::size_t>(r));
        sensitivity_row(net, ud, um, out);
        if (!normalized) continue;
        const double v_ref = ud[layout.cells[m.meas_pos]] - ud[layout.cells[m.meas_neg]];
        if (std::abs(v_ref) < 1e-14) {
            failures[r] = "jacobian: reference voltage of entry " + std::to_string(r) +
                          " is too small to normalize";
            continue;
        }
        for (std::size_t n = 0; n < out.size(); ++n) out[n] = -out[n] * reference.values[n] / v_ref;
    }
    for (const auto& f : failures) {
        if (!f.empty()) throw NumericalError(f);
    }
    return s;
}

}  // namespace

SensitivityMatrix raw_sensitivity(const ImageField& reference, const ElectrodeLayout& layout,
                                  const Protocol& protocol, const SolverOptions& opts) {
    return assemble(reference, layout, protocol, opts, false);
}

SensitivityMatrix jacobian(const ImageField& reference, const ElectrodeLayout& layout,
                           const Protocol& protocol, const SolverOptions& opts) {
    return assemble(reference, layout, protocol, opts, true);
}

VoltageFrame normalize_measurements(const VoltageFrame& v_o, const VoltageFrame& v_r) {
    if (v_o.size() != v_r.size()) throw InvalidArgument("normalize: frame lengths differ");
    VoltageFrame out;
    out.kind = FrameKind::normalized;
    out.values.resize(v_o.size());
    for (std::size_t k = 0; k < v_o.size(); ++k) {
        if (std::abs(v_r.values[k]) < 1e-14) {
            throw NumericalError("normalize: reference entry " + std::to_string(k) + " is near zero");
        }
        out.values[k] = (v_o.values[k] - v_r.values[k]) / v_r.values[k];
    }
    return out;
}

ImageField normalize_conductivity(const ImageField& s_o, const ImageField& s_r) {
    if (s_o.size() != s_r.size() || !(*s_o.mask == *s_r.mask)) {
        throw InvalidArgument("normalize: fields live on different masks");
    }
    std::vector<double> out(s_o.size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (!(s_r.values[n] > 0.0)) throw InvalidArgument("normalize: reference conductivity must be > 0");
        out[n] = -(s_o.values[n] - s_r.values[n]) / s_r.values[n];
    }
    return ImageField(s_r.mask, std::move(out));
}

VoltageFrame add_noise(const VoltageFrame& v, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw InvalidArgument("add_noise: SNR must be finite or +inf");
    }
    if (std::isinf(snr_db) || v.values.empty()) return v;
    double power = 0.0;
    for (double x : v.values) power += x * x;
    power /= static_cast<double>(v.size());
    const double stddev = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, stddev);
    VoltageFrame out = v;
    for (double& x : out.values) x += noise(rng);
    return out;
}

std::vector<double> multiply(const SensitivityMatrix& j, std::span<const double> x) {
    if (x.size() != j.cols) throw InvalidArgument("multiply: vector length does not match columns");
    std::vector<double> y(j.rows);
    kernels::parallel::gemv({j.data.data(), j.rows, j.cols}, x, {}, y);
    return y;
}

std::vector<double> multiply_transpose(const SensitivityMatrix& j, std::span<const double> x) {
    if (x.size() != j.rows) throw InvalidArgument("multiply_transpose: vector length does not match rows");
    std::vector<double> y(j.cols);
    kernels::parallel::gemv_t({j.data.data(), j.rows, j.cols}, x, y);
    return y;
}

}  // namespace rsip
