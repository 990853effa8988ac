#include "rsip/recon.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>
#include <variant>

#include "rsip/errors.hpp"
#include "rsip/kernels.hpp"
#include "rsip/mlp.hpp"
#include "rsip/optim.hpp"

namespace rsip {

namespace {

struct AlgorithmName {
    Algorithm algorithm;
    std::string_view name;
};

constexpr std::array<AlgorithmName, 4> kNames{{
    {Algorithm::rsip_tv, "rsip_tv"},
    {Algorithm::rsip_lap, "rsip_lap"},
    {Algorithm::baseline_tv, "baseline_tv"},
    {Algorithm::baseline_lap, "baseline_lap"},
}};

constexpr double kDivergenceFactor = 1e6;

// Objective pieces shared by both solvers.
class Objective {
public:
    Objective(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask, const ReconConfig& cfg)
        : j_(j), v_(v.values), weight_over_n_(cfg.weight / static_cast<double>(mask->size())),
          residual_(j.rows), jt_r_(j.cols), reg_grad_(j.cols) {
        if (j.cols != mask->size()) {
            throw InvalidArgument("recon: J has " + std::to_string(j.cols) + " columns but the region has " +
                                  std::to_string(mask->size()) + " cells");
        }
        if (j.rows != v.size()) {
            throw InvalidArgument("recon: J has " + std::to_string(j.rows) + " rows but V has " +
                                  std::to_string(v.size()) + " entries");
        }
        if (v.kind != FrameKind::normalized) throw InvalidArgument("recon: V must be a normalized frame");
        if (cfg.weight > 0.0) {
            if (regularizer_of(cfg.algorithm) == RegularizerKind::tv) {
                penalty_.emplace<TotalVariation>(mask, cfg.tv_epsilon);
            } else {
                penalty_.emplace<LaplacianPenalty>(mask, default_kernel(mask->grid().ndim));
            }
        }
    }

    /// Returns (loss, fidelity) and writes dL/dsigma.
    std::pair<double, double> evaluate(std::span<const double> sigma, std::span<double> dsigma) {
        const kernels::MatrixView jv{j_.data.data(), j_.rows, j_.cols};
        kernels::parallel::gemv(jv, sigma, {}, residual_);
        double fidelity = 0.0;
        for (std::size_t m = 0; m < residual_.size(); ++m) {
            residual_[m] = v_[m] - residual_[m];
            fidelity += residual_[m] * residual_[m];
        }
        kernels::parallel::gemv_t(jv, residual_, jt_r_);
        double reg = 0.0;
        if (auto* tv = std::get_if<TotalVariation>(&penalty_)) {
            reg = tv->evaluate(sigma, reg_grad_);
        } else if (auto* lap = std::get_if<LaplacianPenalty>(&penalty_)) {
            reg = lap->evaluate(sigma, reg_grad_);
        }
        const bool regularized = !std::holds_alternative<std::monostate>(penalty_);
        for (std::size_t n = 0; n < dsigma.size(); ++n) {
            dsigma[n] = -2.0 * jt_r_[n] + (regularized ? weight_over_n_ * reg_grad_[n] : 0.0);
        }
        return {fidelity + weight_over_n_ * reg, fidelity};
    }

private:
    const SensitivityMatrix& j_;
    std::span<const double> v_;
    double weight_over_n_;
    std::vector<double> residual_;
    std::vector<double> jt_r_;
    std::vector<double> reg_grad_;
    std::variant<std::monostate, TotalVariation, LaplacianPenalty> penalty_;
};

void check_progress(double loss, double initial, int iteration) {
    if (!std::isfinite(loss)) {
        throw NumericalError("recon: non-finite objective at iteration " + std::to_string(iteration));
    }
    if (iteration > 0 && loss > kDivergenceFactor * initial) {
        std::ostringstream msg;
        msg << "recon: objective diverged at iteration " << iteration << " (" << loss << " vs initial "
            << initial << "); lower the learning rate";
        throw NumericalError(msg.str());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(Algorithm a) {
    for (const auto& n : kNames) {
        if (n.algorithm == a) return n.name;
    }
    return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
    for (const auto& n : kNames) {
        if (n.name == name) return n.algorithm;
    }
    throw InvalidArgument("unknown algorithm '" + std::string(name) +
                          "' (expected rsip_tv, rsip_lap, baseline_tv or baseline_lap)");
}

bool is_rsip(Algorithm a) { return a == Algorithm::rsip_tv || a == Algorithm::rsip_lap; }

RegularizerKind regularizer_of(Algorithm a) {
    return (a == Algorithm::rsip_tv || a == Algorithm::baseline_tv) ? RegularizerKind::tv
                                                                     : RegularizerKind::laplacian;
}

ReconConfig ReconConfig::defaults(Algorithm algorithm, int ndim) {
    ReconConfig c;
    c.algorithm = algorithm;
    c.iterations = 2000;
    if (is_rsip(algorithm)) {
        c.lr = ndim == 3 ? 5e-4 : 1e-4;
    } else {
        c.lr = 1e-2;
    }
    return c;
}

void ReconConfig::validate() const {
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidArgument("config: weight must be >= 0");
    if (iterations < 1) throw InvalidArgument("config: iterations must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("config: lr must be > 0");
    if (mlp_input < 1 || mlp_hidden < 1) throw InvalidArgument("config: MLP layer sizes must be >= 1");
    if (!(tv_epsilon > 0.0)) throw InvalidArgument("config: tv_epsilon must be > 0");
}

ReconConfig config_from_json(const nlohmann::json& doc, int ndim) {
    try {
        const Algorithm alg = algorithm_from_string(doc.value("algorithm", std::string("rsip_tv")));
        ReconConfig c = ReconConfig::defaults(alg, ndim);
        if (doc.contains("weight")) c.weight = doc.at("weight").get<double>();
        if (doc.contains("eta")) c.weight = doc.at("eta").get<double>();
        if (doc.contains("phi")) c.weight = doc.at("phi").get<double>();
        c.iterations = doc.value("iterations", c.iterations);
        c.lr = doc.value("lr", c.lr);
        c.seed = doc.value("seed", c.seed);
        c.mlp_input = doc.value("mlp_input", c.mlp_input);
        c.mlp_hidden = doc.value("mlp_hidden", c.mlp_hidden);
        c.record_trace = doc.value("record_trace", c.record_trace);
        c.tv_epsilon = doc.value("tv_epsilon", c.tv_epsilon);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config JSON: ") + e.what());
    }
}

nlohmann::json config_to_json(const ReconConfig& c) {
    return {{"algorithm", std::string(to_string(c.algorithm))},
            {"weight", c.weight},
            {"iterations", c.iterations},
            {"lr", c.lr},
            {"seed", c.seed},
            {"mlp_input", c.mlp_input},
            {"mlp_hidden", c.mlp_hidden},
            {"record_trace", c.record_trace},
            {"tv_epsilon", c.tv_epsilon}};
}

ReconResult rsip_reconstruct(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask,
                             const ReconConfig& cfg) {
    if (!is_rsip(cfg.algorithm)) throw InvalidArgument("rsip_reconstruct: algorithm is not an R-SIP variant");
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Objective objective(j, v, mask, cfg);
    const std::size_t n = mask->size();

    MlpParams params = init_params(cfg.mlp_input, cfg.mlp_hidden, n, cfg.seed);
    const std::vector<double> rho = make_noise_input(cfg.mlp_input, cfg.seed);
    AdamState adam = AdamState::zeros(params.flat().size(), cfg.lr);
    std::vector<double> grad(params.flat().size());
    std::vector<double> dsigma(n);
    ForwardCache cache;

    ReconResult result{ImageField::filled(mask, 0.0), {}, {}, 0.0, 0.0, 0.0, 0.0};
    if (cfg.record_trace) {
        result.loss_trace.reserve(static_cast<std::size_t>(cfg.iterations));
        result.fidelity_trace.reserve(static_cast<std::size_t>(cfg.iterations));
    }
    double initial_loss = 0.0;
    for (int it = 0; it < cfg.iterations; ++it) {
        forward(params, rho, cache);
        const auto [loss, fidelity] = objective.evaluate(cache.output, dsigma);
        if (it == 0) {
            initial_loss = loss;
            result.initial_fidelity = fidelity;
        }
        check_progress(loss, initial_loss, it);
        if (cfg.record_trace) {
            result.loss_trace.push_back(loss);
            result.fidelity_trace.push_back(fidelity);
        }
        backward(params, cache, dsigma, grad);
        adam_step(adam, params.flat(), grad);
    }
    forward(params, rho, cache);
    const auto [loss, fidelity] = objective.evaluate(cache.output, dsigma);
    check_progress(loss, initial_loss, cfg.iterations);
    result.final_loss = loss;
    result.final_fidelity = fidelity;
    result.sigma = ImageField(mask, cache.output);
    result.wall_time = seconds_since(t0);
    return result;
}

ReconResult baseline_reconstruct(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask,
                                 const ReconConfig& cfg) {
    if (is_rsip(cfg.algorithm)) throw InvalidArgument("baseline_reconstruct: algorithm is not a baseline");
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Objective objective(j, v, mask, cfg);
    const std::size_t n = mask->size();

    std::vector<double> sigma(n, 0.0);
    std::vector<double> dsigma(n);
    AdamState adam = AdamState::zeros(n, cfg.lr);

    ReconResult result{ImageField::filled(mask, 0.0), {}, {}, 0.0, 0.0, 0.0, 0.0};
    double initial_loss = 0.0;
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto [loss, fidelity] = objective.evaluate(sigma, dsigma);
        if (it == 0) {
            initial_loss = loss;
            result.initial_fidelity = fidelity;
        }
        check_progress(loss, initial_loss, it);
        if (cfg.record_trace) {
            result.loss_trace.push_back(loss);
            result.fidelity_trace.push_back(fidelity);
        }
        adam_step(adam, sigma, dsigma);
    }
    const auto [loss, fidelity] = objective.evaluate(sigma, dsigma);
    check_progress(loss, initial_loss, cfg.iterations);
    result.final_loss = loss;
    result.final_fidelity = fidelity;
    result.sigma = ImageField(mask, std::move(sigma));
    result.wall_time = seconds_since(t0);
    return result;
}

ReconResult reconstruct(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask,
                        const ReconConfig& cfg) {
    return is_rsip(cfg.algorithm) ? rsip_reconstruct(j, v, std::move(mask), cfg)
                                  : baseline_reconstruct(j, v, std::move(mask), cfg);
}

ImageField normalize_for_eval(const ImageField& sigma) {
    double peak = 0.0;
    for (double x : sigma.values) peak = std::max(peak, std::abs(x));
    if (!(peak > 0.0)) throw InvalidArgument("normalize_for_eval: field is all zeros");
    std::vector<double> out(sigma.values);
    for (double& x : out) x /= peak;
    return ImageField(sigma.mask, std::move(out));
}

}  // namespace rsip
