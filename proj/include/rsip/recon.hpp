#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsip/grid.hpp"
#include "rsip/regularizers.hpp"
#include "rsip/sensing.hpp"

namespace rsip {

enum class Algorithm { rsip_tv, rsip_lap, baseline_tv, baseline_lap };

inline constexpr std::array<Algorithm, 4> kAllAlgorithms{Algorithm::rsip_tv, Algorithm::rsip_lap,
                                                         Algorithm::baseline_tv, Algorithm::baseline_lap};

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);
bool is_rsip(Algorithm a);
RegularizerKind regularizer_of(Algorithm a);

struct ReconConfig {
    Algorithm algorithm = Algorithm::rsip_tv;
    /// eta for R-SIP, phi for the baselines. The penalty enters the
    /// objective as weight / N * R(sigma) in both cases.
    double weight = 0.0;
    int iterations = 2000;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    std::size_t mlp_input = 328;
    std::size_t mlp_hidden = 2000;
    bool record_trace = true;
    double tv_epsilon = kTvEpsilon;

    /// t = 2000; lr = 1e-4 (planar) or 5e-4 (volume) for R-SIP, 1e-2 for baselines.
    static ReconConfig defaults(Algorithm algorithm, int ndim);
    void validate() const;
};

/// Reads a config document. Missing keys keep the defaults for the
/// document's algorithm; "eta" and "phi" are accepted as aliases of "weight".
ReconConfig config_from_json(const nlohmann::json& doc, int ndim);
nlohmann::json config_to_json(const ReconConfig& cfg);

struct ReconResult {
    ImageField sigma;
    /// Objective and data fidelity ||V - J sigma||^2 before each update.
    std::vector<double> loss_trace;
    std::vector<double> fidelity_trace;
    double initial_fidelity = 0.0;
    double final_fidelity = 0.0;
    double final_loss = 0.0;
    double wall_time = 0.0;
};

/// Minimizes ||V - J k(theta; rho)||^2 + eta/N R(k(theta; rho)) over the
/// parameters theta of the image prior MLP with Adam, starting from
/// init_params(seed) and a fixed noise input drawn from the same seed.
ReconResult rsip_reconstruct(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask,
                             const ReconConfig& cfg);

/// Minimizes ||V - J sigma||^2 + phi/N R(sigma) directly over sigma with
/// Adam, starting from sigma = 0.
ReconResult baseline_reconstruct(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask,
                                 const ReconConfig& cfg);

/// Dispatches on cfg.algorithm.
ReconResult reconstruct(const SensitivityMatrix& j, const VoltageFrame& v, MaskPtr mask,
                        const ReconConfig& cfg);

/// sigma / max|sigma|. Throws InvalidArgument on an all-zero field.
ImageField normalize_for_eval(const ImageField& sigma);

}  // namespace rsip
