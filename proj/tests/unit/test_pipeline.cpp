#include <doctest.h>

#include "helpers.hpp"
#include "rsip/errors.hpp"
#include "rsip/pipeline.hpp"

using namespace rsip;

TEST_CASE("resolutions") {
    CHECK(resolution_for(2, Scale::desk).n == 64);
    CHECK(resolution_for(2, Scale::paper).n == 64);
    const auto d3 = resolution_for(3, Scale::desk);
    CHECK(d3.n == 16);
    CHECK(d3.nz == 20);
    const auto p3 = resolution_for(3, Scale::paper);
    CHECK(p3.n == 32);
    CHECK(p3.nz == 40);
    CHECK(scale_from_string("desk") == Scale::desk);
    CHECK_THROWS_AS(scale_from_string("huge"), InvalidArgument);
}

TEST_CASE("scenario wiring") {
    const auto s = build_scenario(builtin_case(1), 2, {24, 1});
    CHECK(s.j.rows == 104);
    CHECK(s.j.cols == s.mask->size());
    CHECK(s.v.kind == FrameKind::normalized);
    const auto expected_v = normalize_measurements(s.v_obs, s.v_ref);
    CHECK(testing::bitwise_equal(s.v.values, expected_v.values));
    const auto expected_truth = normalize_conductivity(s.observed, s.reference);
    CHECK(testing::bitwise_equal(s.truth.values, expected_truth.values));
    for (double x : s.reference.values) CHECK(x == 2.0);

    const auto noisy = with_noise(s, 30.0, 5);
    CHECK(testing::bitwise_equal(noisy.v.values, add_noise(s.v, 30.0, 5).values));
    CHECK(testing::bitwise_equal(noisy.j.data, s.j.data));
    const auto direct = build_scenario(builtin_case(1), 2, {24, 1}, 30.0, 5);
    CHECK(testing::bitwise_equal(direct.v.values, noisy.v.values));

    const auto v3 = build_scenario(builtin_case(4), 3, {8, 10});
    CHECK(v3.j.rows == 328);
    CHECK(v3.mask->grid().nz == 10);
}

TEST_CASE("evaluation and the study table") {
    const auto s = build_scenario(builtin_case(2), 2, {20, 1});
    const auto same = evaluate(s.truth, s.truth);
    CHECK(same.re == 0.0);
    CHECK(std::abs(same.mssim - 1.0) <= 1e-12);
    auto scaled = s.truth;
    for (double& x : scaled.values) x *= 7.0;
    CHECK(evaluate(scaled, s.truth).re <= 1e-15);

    const auto cfg = study_config(Algorithm::rsip_tv, 2, Scale::desk, 7);
    CHECK(cfg.seed == 7);
    CHECK(cfg.iterations == 2000);
    CHECK(cfg.mlp_hidden == 256);
    CHECK(cfg.lr == 5e-4);
    CHECK(study_config(Algorithm::baseline_tv, 2, Scale::desk, 7).lr == 1e-2);
    CHECK(study_config(Algorithm::rsip_lap, 3, Scale::desk, 7).lr == 5e-4);
    const auto full = study_config(Algorithm::rsip_tv, 2, Scale::paper, 7);
    CHECK(full.mlp_hidden == 2000);
    CHECK(full.lr == 1e-4);

    std::vector<StudyRow> rows{{1, Algorithm::rsip_tv, 0.1, {0.25, 0.8}, 15.5, 1e-3},
                               {3, Algorithm::baseline_lap, 10.0, {0.5, 0.25}, 4.0, 2e-4}};
    CHECK(study_csv(rows) ==
          "case,algorithm,weight,re,mssim,initial_fidelity,final_fidelity\n"
          "1,rsip_tv,0.1,0.250000,0.800000,1.550000e+01,1.000000e-03\n"
          "3,baseline_lap,10,0.500000,0.250000,4.000000e+00,2.000000e-04\n");
}
