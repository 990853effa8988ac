#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsip/errors.hpp"
#include "rsip/io.hpp"
#include "rsip/kernels.hpp"
#include "rsip/metrics.hpp"
#include "rsip/phantom.hpp"
#include "rsip/pipeline.hpp"
#include "rsip/recon.hpp"
#include "rsip/sensing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsip;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string sha256_hex(const fs::path& path) {
    const io::Bytes bytes = io::read_file(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed for " + path.string());
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

json file_record(const fs::path& path) { return {{"path", path.string()}, {"sha256", sha256_hex(path)}}; }

json read_json(const fs::path& path) {
    const io::Bytes bytes = io::read_file(path);
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    io::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

VoltageFrame read_frame(const fs::path& path, FrameKind kind) { return {io::read_vector(path), kind}; }

MaskPtr mask_for(int ndim, Resolution res) {
    return share(ndim == 2 ? make_circular_mask(res.n) : make_cylindrical_mask(res.n, res.n, res.nz));
}

// ---------------------------------------------------------------- phantom

struct PhantomArgs {
    int case_id = 0;
    std::string spec;
    int ndim = 0;
    std::string scale = "desk";
    int n = 0;
    int nz = 0;
    std::optional<double> uniform;
    bool truth = false;
    std::string out;
};

void run_phantom(const PhantomArgs& a) {
    PhantomSpec spec;
    int ndim = a.ndim;
    if (a.case_id != 0) {
        spec = builtin_case(a.case_id);
        if (ndim == 0) ndim = builtin_case_ndim(a.case_id);
    } else if (!a.spec.empty()) {
        spec = phantom_from_json(read_json(a.spec));
    } else {
        throw InvalidArgument("phantom: give --case or --spec");
    }
    if (ndim != 2 && ndim != 3) throw InvalidArgument("phantom: --ndim must be 2 or 3");
    Resolution res = resolution_for(ndim, scale_from_string(a.scale));
    if (a.n > 0) res.n = a.n;
    if (a.nz > 0) res.nz = a.nz;
    if (ndim == 2) res.nz = 1;
    const MaskPtr mask = mask_for(ndim, res);

    ImageField field = a.uniform ? ImageField::filled(mask, *a.uniform) : rasterize(spec, mask);
    if (a.truth) field = normalize_conductivity(field, ImageField::filled(mask, spec.background));
    io::write_image(a.out, field);
    std::cout << "cells: " << mask->size() << "\n";
}

// ---------------------------------------------------------------- protocol

void run_protocol(const std::string& kind, bool list) {
    Protocol p;
    if (kind == "2d") {
        p = default_protocol(2);
    } else if (kind == "3d") {
        p = default_protocol(3);
    } else {
        throw InvalidArgument("protocol: expected 2d or 3d, got '" + kind + "'");
    }
    if (list) {
        std::cout << "drive_pos,drive_neg,meas_pos,meas_neg\n";
        for (const auto& m : p.entries) {
            std::cout << m.drive_pos << ',' << m.drive_neg << ',' << m.meas_pos << ',' << m.meas_neg << '\n';
        }
    }
    std::cout << "entries: " << p.size() << "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string phantom;
    std::string reference;
    std::string out_raw;
    std::string out_ref;
    std::string out;
    double snr_db = kNoiseFree;
    std::uint64_t seed = 0;
};

void run_simulate(const SimulateArgs& a) {
    const ImageField observed = io::read_image(a.phantom);
    const ImageField reference = io::read_image(a.reference);
    if (!(*observed.mask == *reference.mask)) throw InvalidArgument("simulate: phantom and reference masks differ");
    const ElectrodeLayout layout = default_layout(*observed.mask);
    const Protocol protocol = default_protocol(observed.grid().ndim);
    const VoltageFrame v_obs = simulate_voltages(observed, layout, protocol);
    const VoltageFrame v_ref = simulate_voltages(reference, layout, protocol);
    const VoltageFrame v = add_noise(normalize_measurements(v_obs, v_ref), a.snr_db, a.seed);
    io::write_vector(a.out_raw, v_obs.values);
    if (!a.out_ref.empty()) io::write_vector(a.out_ref, v_ref.values);
    io::write_vector(a.out, v.values);
    std::cout << "measurements: " << v.size() << "\n";
}

// ---------------------------------------------------------------- jacobian

void run_jacobian(const std::string& reference_path, const std::string& out) {
    const ImageField reference = io::read_image(reference_path);
    const ElectrodeLayout layout = default_layout(*reference.mask);
    const SensitivityMatrix j = jacobian(reference, layout, default_protocol(reference.grid().ndim));
    io::write_matrix(out, j);
    std::cout << "jacobian: " << j.rows << " x " << j.cols << "\n";
}

// ---------------------------------------------------------------- recon

struct ReconArgs {
    std::string jacobian;
    std::string voltages;
    std::string mask_from;
    std::string config;
    std::string algorithm;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::string out;
    std::string trace;
    std::string manifest;
};

void run_recon(const ReconArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    const SensitivityMatrix j = io::read_matrix(a.jacobian);
    const VoltageFrame v = read_frame(a.voltages, FrameKind::normalized);
    const ImageField like = io::read_image(a.mask_from);
    const int ndim = like.grid().ndim;

    json doc = a.config.empty() ? json::object() : read_json(a.config);
    if (!a.algorithm.empty()) doc["algorithm"] = a.algorithm;
    ReconConfig cfg = config_from_json(doc, ndim);
    if (a.seed) cfg.seed = *a.seed;
    if (a.iterations) cfg.iterations = *a.iterations;
    cfg.validate();

    const ReconResult r = reconstruct(j, v, like.mask, cfg);
    io::write_image(a.out, r.sigma);

    json outputs = json::array();
    outputs.push_back(file_record(a.out));
    if (!a.trace.empty()) {
        std::ostringstream csv;
        csv << "iteration,loss,fidelity\n" << std::setprecision(17);
        for (std::size_t t = 0; t < r.loss_trace.size(); ++t) {
            csv << t << ',' << r.loss_trace[t] << ',' << r.fidelity_trace[t] << '\n';
        }
        write_text(a.trace, csv.str());
        outputs.push_back(file_record(a.trace));
    }

    std::cout << "initial fidelity: " << r.initial_fidelity << "\nfinal fidelity: " << r.final_fidelity << "\n";
    if (a.manifest.empty()) return;
    json inputs = json::array();
    inputs.push_back(file_record(a.jacobian));
    inputs.push_back(file_record(a.voltages));
    inputs.push_back(file_record(a.mask_from));
    if (!a.config.empty()) inputs.push_back(file_record(a.config));
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json manifest{{"command", "recon"},
                        {"config", config_to_json(cfg)},
                        {"seeds", {{"mlp_init", cfg.seed}, {"noise_input", cfg.seed}}},
                        {"inputs", inputs},
                        {"outputs", outputs},
                        {"wall_time", {{"reconstruction", r.wall_time}, {"total", total}}},
                        {"results",
                         {{"initial_fidelity", r.initial_fidelity},
                          {"final_fidelity", r.final_fidelity},
                          {"final_loss", r.final_loss}}}};
    write_text(a.manifest, manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- eval

void run_eval(const std::string& recon, const std::string& truth, const std::string& out) {
    const Evaluation e = evaluate(io::read_image(recon), io::read_image(truth));
    const json doc{{"re", e.re}, {"mssim", e.mssim}};
    if (!out.empty()) write_text(out, doc.dump() + "\n");
    std::cout << doc.dump() << "\n";
}

// ---------------------------------------------------------------- render

struct RenderArgs {
    std::string in;
    std::string axis;
    int index = -1;
    std::string out;
    std::string voxels;
    double threshold = 0.1;
};

void run_render(const RenderArgs& a) {
    const ImageField field = normalize_for_eval(io::read_image(a.in));
    io::Gray8 img;
    if (field.grid().ndim == 2 && a.axis.empty()) {
        img = io::render_image(field);
    } else {
        if (a.axis.empty()) throw InvalidArgument("render: volumes need --axis and --index");
        const io::Axis axis = io::axis_from_string(a.axis);
        int index = a.index;
        if (index < 0 && field.grid().ndim == 3) {
            const auto& g = field.grid();
            index = (axis == io::Axis::x ? g.nx : axis == io::Axis::y ? g.ny : g.nz) / 2;
        }
        img = io::render_slice(field, axis, index);
    }
    io::write_pgm(a.out, img);
    if (!a.voxels.empty()) io::write_voxel_list(a.voxels, field, a.threshold);
    std::cout << "image: " << img.width << " x " << img.height << "\n";
}

// ---------------------------------------------------------------- repro

void run_repro(const std::string& scale, std::uint64_t seed, const std::string& out) {
    const std::string csv = study_csv(run_study(scale_from_string(scale), seed));
    if (!out.empty()) write_text(out, csv);
    std::cout << csv;
}

}  // namespace

int main(int argc, char** argv) {
    kernels::configure_threads_from_env();

    CLI::App app{"Regularized shallow image prior reconstruction for difference EIT"};
    app.require_subcommand(1);

    PhantomArgs pa;
    auto* phantom = app.add_subcommand("phantom", "Rasterize a builtin case or JSON phantom to .eimg");
    auto* case_opt = phantom->add_option("--case", pa.case_id, "Builtin case 1-5")->check(CLI::Range(1, 5));
    phantom->add_option("--spec", pa.spec, "Phantom JSON document")->excludes(case_opt)->check(CLI::ExistingFile);
    phantom->add_option("--ndim", pa.ndim, "2 or 3 (required with --spec)");
    phantom->add_option("--scale", pa.scale, "desk or paper grid size")->capture_default_str();
    phantom->add_option("--n", pa.n, "Override the in-plane cell count");
    phantom->add_option("--nz", pa.nz, "Override the number of slices");
    phantom->add_option("--uniform", pa.uniform, "Write a uniform field with this conductivity instead");
    phantom->add_flag("--truth", pa.truth, "Write -(sigma - background) / background instead of sigma");
    phantom->add_option("-o,--out", pa.out, "Output .eimg")->required();

    std::string protocol_kind;
    bool protocol_list = false;
    auto* protocol = app.add_subcommand("protocol", "List a stimulation/measurement protocol");
    protocol->add_option("kind", protocol_kind, "2d or 3d")->required();
    protocol->add_flag("--list", protocol_list, "Print every entry");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Forward-solve voltages for a phantom and a reference");
    simulate->add_option("--phantom", sa.phantom, "Observed conductivity .eimg")->required()->check(CLI::ExistingFile);
    simulate->add_option("--reference", sa.reference, "Reference conductivity .eimg")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out-raw", sa.out_raw, "Raw observed voltages .f64vec")->required();
    simulate->add_option("--out-ref", sa.out_ref, "Raw reference voltages .f64vec");
    simulate->add_option("-o,--out", sa.out, "Normalized voltages .f64vec")->required();
    simulate->add_option("--snr-db", sa.snr_db, "Add Gaussian noise at this SNR");
    simulate->add_option("--seed", sa.seed, "Noise seed");

    std::string jac_ref, jac_out;
    auto* jac = app.add_subcommand("jacobian", "Normalized sensitivity matrix at a reference field");
    jac->add_option("--reference", jac_ref, "Reference conductivity .eimg")->required()->check(CLI::ExistingFile);
    jac->add_option("-o,--out", jac_out, "Output .f64mat")->required();

    ReconArgs ra;
    auto* recon = app.add_subcommand("recon", "Reconstruct a normalized conductivity change");
    recon->add_option("--jacobian", ra.jacobian, ".f64mat")->required()->check(CLI::ExistingFile);
    recon->add_option("--voltages", ra.voltages, "Normalized .f64vec")->required()->check(CLI::ExistingFile);
    recon->add_option("--mask-from", ra.mask_from, "Any .eimg on the target region")->required()->check(CLI::ExistingFile);
    recon->add_option("--config", ra.config, "Config JSON")->check(CLI::ExistingFile);
    recon->add_option("--algorithm", ra.algorithm, "rsip_tv, rsip_lap, baseline_tv or baseline_lap");
    recon->add_option("--seed", ra.seed, "Override the config seed");
    recon->add_option("--iterations", ra.iterations, "Override the iteration count");
    recon->add_option("-o,--out", ra.out, "Output .eimg")->required();
    recon->add_option("--trace", ra.trace, "Loss trace CSV");
    recon->add_option("--manifest", ra.manifest, "Run manifest JSON");

    std::string ev_recon, ev_truth, ev_out;
    auto* eval = app.add_subcommand("eval", "RE and MSSIM of a reconstruction");
    eval->add_option("--recon", ev_recon, "Reconstruction .eimg")->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", ev_truth, "Ground truth .eimg")->required()->check(CLI::ExistingFile);
    eval->add_option("-o,--out", ev_out, "Metrics JSON");

    RenderArgs rd;
    auto* render = app.add_subcommand("render", "Render a field or a volume slice to PGM");
    render->add_option("--in", rd.in, ".eimg")->required()->check(CLI::ExistingFile);
    render->add_option("--axis", rd.axis, "x, y or z (volumes)");
    render->add_option("--index", rd.index, "Slice index (default: middle)");
    render->add_option("-o,--out", rd.out, "Output .pgm")->required();
    render->add_option("--voxels", rd.voxels, "Also write a thresholded voxel list CSV");
    render->add_option("--threshold", rd.threshold, "Voxel list threshold on |value|")->capture_default_str();

    std::string rp_scale = "desk", rp_out;
    std::uint64_t rp_seed = 0;
    auto* repro = app.add_subcommand("repro", "Run cases 1-5 with all four algorithms");
    repro->add_option("--scale", rp_scale, "desk or paper")->capture_default_str();
    repro->add_option("--seed", rp_seed, "Seed for every reconstruction")->capture_default_str();
    repro->add_option("-o,--out", rp_out, "Summary CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*phantom) run_phantom(pa);
        if (*protocol) run_protocol(protocol_kind, protocol_list);
        if (*simulate) run_simulate(sa);
        if (*jac) run_jacobian(jac_ref, jac_out);
        if (*recon) run_recon(ra);
        if (*eval) run_eval(ev_recon, ev_truth, ev_out);
        if (*render) run_render(rd);
        if (*repro) run_repro(rp_scale, rp_seed, rp_out);
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
