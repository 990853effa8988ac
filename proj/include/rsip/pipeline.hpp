#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsip/grid.hpp"
#include "rsip/phantom.hpp"
#include "rsip/recon.hpp"
#include "rsip/sensing.hpp"

namespace rsip {

enum class Scale { desk, paper };

Scale scale_from_string(const std::string& name);

/// Grid resolution of an experiment: planar n x n, or n x n x nz volumes.
struct Resolution {
    int n = 64;
    int nz = 1;
};

/// planar: 64 x 64 at both scales. volume: 16 x 16 x 20 (desk) or 32 x 32 x 40 (paper).
Resolution resolution_for(int ndim, Scale scale);

/// Everything one difference-imaging experiment needs: a uniform reference,
/// the phantom observation, their nonlinear forward voltages, the
/// normalized data and the Jacobian at the reference.
struct Scenario {
    int case_id = 0;
    MaskPtr mask;
    ElectrodeLayout layout;
    Protocol protocol;
    ImageField reference;
    ImageField observed;
    /// -(observed - reference) / reference
    ImageField truth;
    VoltageFrame v_ref;
    VoltageFrame v_obs;
    /// normalized data fed to reconstruction, noise included
    VoltageFrame v;
    SensitivityMatrix j;
};

/// Builds a scenario for a phantom. Noise at snr_db (kNoiseFree for none)
/// is added to the normalized frame.
Scenario build_scenario(const PhantomSpec& phantom, int ndim, Resolution res, double snr_db = kNoiseFree,
                        std::uint64_t noise_seed = 0);
Scenario build_builtin_scenario(int case_id, Scale scale, double snr_db = kNoiseFree,
                                std::uint64_t noise_seed = 0);

/// Same data with different noise; reuses the Jacobian and clean frames.
Scenario with_noise(const Scenario& clean, double snr_db, std::uint64_t noise_seed);

struct Evaluation {
    double re = 0.0;
    double mssim = 0.0;
};

/// RE and MSSIM after max-abs normalization of both fields.
Evaluation evaluate(const ImageField& reconstruction, const ImageField& truth);

/// Experiment settings. Paper scale uses the default configs; desk scale
/// narrows the hidden layer to 256 and raises the planar R-SIP step to
/// 5e-4. Both use weights tuned on the builtin cases.
ReconConfig study_config(Algorithm algorithm, int ndim, Scale scale, std::uint64_t seed);

struct StudyRow {
    int case_id = 0;
    Algorithm algorithm = Algorithm::rsip_tv;
    double weight = 0.0;
    Evaluation metrics;
    double initial_fidelity = 0.0;
    double final_fidelity = 0.0;
};

/// Cases 1-5 x all four algorithms.
std::vector<StudyRow> run_study(Scale scale, std::uint64_t seed);

/// CSV table "case,algorithm,weight,re,mssim,initial_fidelity,final_fidelity"
/// with fixed formatting so identical runs give identical bytes.
std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace rsip
