#include <doctest.h>

#include <cmath>
#include <limits>

#include "qem/simulation.hpp"

using namespace qem;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("type2_censor transform") {
    const Dataset d = type2_censor({2.0, 5.0, 9.0}, 1);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == IntervalObservation(2.0, 2.0));
    CHECK(d[1] == IntervalObservation(5.0, 5.0));
    CHECK(d[2].lower == 5.0);
    CHECK(d[2].upper == kInf);

    const Dataset all = type2_censor({9.0, 2.0, 5.0}, 0);
    CHECK(all.exact_count() == 3);
    CHECK(all[0].lower == 2.0); // sorted
    CHECK(all[2].lower == 9.0);

    CHECK_THROWS_AS(type2_censor({1.0, 2.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(type2_censor({1.0}, -1), std::invalid_argument);
}

TEST_CASE("simulate_type2_censored is seed-deterministic") {
    const ModelParams truth(NormalParams{50.0, 5.0});
    const Dataset a = simulate_type2_censored(truth, 20, 5, 42);
    const Dataset b = simulate_type2_censored(truth, 20, 5, 42);
    const Dataset c = simulate_type2_censored(truth, 20, 5, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.size() == 20);
    CHECK(a.exact_count() == 15);
}

TEST_CASE("run_study reference self-consistency") {
    StudyConfig cfg(ModelTag::normal, ModelParams(NormalParams{50.0, 5.0}));
    cfg.sample_size = 15;
    cfg.censored_count = 3;
    cfg.replications = 8;
    cfg.iterations_per_fit = 6;
    cfg.base_seed = 7;
    cfg.cells = {{Strategy::exact_em, 0}};
    const auto t = run_study(cfg);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].is_reference);
    for (std::size_t p = 0; p < 2; ++p) {
        CHECK(t.rows[0].bias[p] == 0.0);
        CHECK(t.rows[0].mse[p] == 0.0);
        CHECK(t.rows[0].sre[p] == 1.0);
    }
    CHECK(t.rows[0].failures == 0);
}

TEST_CASE("run_study with a single replication") {
    StudyConfig cfg(ModelTag::normal, ModelParams(NormalParams{10.0, 2.0}));
    cfg.sample_size = 12;
    cfg.censored_count = 2;
    cfg.replications = 1;
    cfg.iterations_per_fit = 5;
    cfg.cells = {{Strategy::exact_em, 0}, {Strategy::qem, 16}};
    const auto t = run_study(cfg);
    for (const auto& row : t.rows)
        for (double v : row.mse)
            CHECK(v == 0.0); // variance of one difference
}

TEST_CASE("QEM beats MCEM at equal K in study MSE") {
    StudyConfig cfg(ModelTag::normal, ModelParams(NormalParams{50.0, 5.0}));
    cfg.sample_size = 20;
    cfg.censored_count = 5;
    cfg.replications = 30;
    cfg.iterations_per_fit = 10;
    cfg.base_seed = 11;
    cfg.cells = {{Strategy::exact_em, 0}, {Strategy::mcem, 32}, {Strategy::qem, 32}};
    const auto t = run_study(cfg);
    for (std::size_t p = 0; p < 2; ++p) {
        CHECK(t.rows[2].mse[p] < t.rows[1].mse[p]);
        CHECK(t.rows[1].sre[p] < t.rows[2].sre[p]);
        CHECK(t.rows[0].sre[p] == 1.0);
    }
    CHECK(t.rows[0].failures == 0);
    CHECK(t.rows[1].failures == 0);
}

TEST_CASE("QEM beats MCEM across randomized study configurations") {
    // the gap is orders of magnitude, so every sampled configuration should
    // come out ahead
    const int grids[] = {10, 32, 100};
    int wins = 0, total = 0;
    for (int c = 0; c < 6; ++c) {
        const bool use_normal = c % 2 == 0;
        StudyConfig cfg(use_normal ? ModelTag::normal : ModelTag::rayleigh,
                        use_normal ? ModelParams(NormalParams{50.0, 5.0})
                                   : ModelParams(RayleighParams{10.0}));
        cfg.sample_size = 20;
        cfg.censored_count = 5;
        cfg.replications = 20;
        cfg.iterations_per_fit = 10;
        cfg.base_seed = 1000 + c;
        const int k = grids[c % 3];
        cfg.cells = {{Strategy::mcem, k}, {Strategy::qem, k}};
        const auto t = run_study(cfg);
        for (std::size_t p = 0; p < t.parameter_names.size(); ++p) {
            ++total;
            wins += t.rows[1].mse[p] < t.rows[0].mse[p] ? 1 : 0;
        }
    }
    CHECK(wins == total);
}

TEST_CASE("study table formats") {
    StudyConfig cfg(ModelTag::rayleigh, ModelParams(RayleighParams{10.0}));
    cfg.sample_size = 10;
    cfg.censored_count = 2;
    cfg.replications = 4;
    cfg.iterations_per_fit = 4;
    cfg.cells = {{Strategy::qem, 8}, {Strategy::mcem, 8}};
    const auto t = run_study(cfg);

    const std::string csv = study_csv(t);
    CHECK(csv.rfind("strategy,k,parameter,bias,mse,msd,sre,failures\n", 0) == 0);
    CHECK(csv.find("qem,8,beta,") != std::string::npos);
    CHECK(csv.find("mcem,8,beta,") != std::string::npos);

    const std::string text = study_text(t);
    CHECK(text.find("replications: 4") != std::string::npos);
    CHECK(text.find("qem") != std::string::npos);
}

TEST_CASE("study validation") {
    StudyConfig cfg(ModelTag::rayleigh, ModelParams(RayleighParams{10.0}));
    cfg.sample_size = 10;
    cfg.censored_count = 2;
    cfg.replications = 2;
    cfg.cells = {{Strategy::exact_em, 0}}; // exact EM unavailable for rayleigh
    CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);

    StudyConfig empty(ModelTag::normal, ModelParams(NormalParams{0.0, 1.0}));
    empty.sample_size = 5;
    empty.censored_count = 0;
    empty.replications = 2;
    CHECK_THROWS_AS(run_study(empty), std::invalid_argument);
}
