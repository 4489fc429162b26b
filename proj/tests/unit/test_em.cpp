#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "qem/em.hpp"
#include "qem/fixtures.hpp"
#include "qem/rng.hpp"

using namespace qem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool bit_equal(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

bool bit_equal(const FitResult& a, const FitResult& b) {
    if (a.converged != b.converged || a.iterations != b.iterations ||
        a.trace.size() != b.trace.size())
        return false;
    for (std::size_t s = 0; s < a.trace.size(); ++s) {
        const auto va = a.trace[s].values();
        const auto vb = b.trace[s].values();
        for (std::size_t j = 0; j < va.size(); ++j)
            if (!bit_equal(va[j], vb[j]))
                return false;
    }
    return true;
}

Dataset random_censored_dataset(ModelTag tag, const CounterStream& rng, std::uint64_t t) {
    const int n = 5 + static_cast<int>(rng.uniform01(t, 0, 0) * 15);
    const ModelParams truth = tag == ModelTag::exponential
                                  ? ModelParams(ExponentialParams{0.5 + rng.uniform01(t, 1, 0)})
                                  : ModelParams(NormalParams{2.0 * rng.uniform01(t, 1, 0),
                                                             0.5 + rng.uniform01(t, 2, 0)});
    std::vector<IntervalObservation> obs;
    for (int i = 0; i < n; ++i) {
        const double x = quantile(truth, rng.uniform01(t, 3, i));
        const double kind = rng.uniform01(t, 4, i);
        if (kind < 0.4)
            obs.emplace_back(x, x);
        else if (kind < 0.7)
            obs.emplace_back(x, kInf);
        else
            obs.emplace_back(x, x + 0.2 + rng.uniform01(t, 5, i));
    }
    return Dataset(std::move(obs));
}

} // namespace

TEST_CASE("quantile_grid schemes") {
    CHECK(quantile_grid(4, XiScheme::midpoint) == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    CHECK(quantile_grid(1, XiScheme::midpoint) == std::vector<double>{0.5});
    CHECK(quantile_grid(3, XiScheme::shifted) == std::vector<double>{0.25, 0.5, 0.75});
    CHECK(quantile_grid(4, XiScheme::left) == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    for (auto scheme : {XiScheme::midpoint, XiScheme::shifted}) {
        const auto g = quantile_grid(100, scheme);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(g[i] > 0.0);
            CHECK(g[i] < 1.0);
            if (i > 0)
                CHECK(g[i] > g[i - 1]);
        }
    }
    CHECK_THROWS_AS(quantile_grid(0, XiScheme::midpoint), std::invalid_argument);
}

TEST_CASE("estep_matrix rows") {
    const Dataset ds({{6.0, 6.0}, {6.0, kInf}});
    FitConfig cfg(ModelParams(ExponentialParams{1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 2;

    const auto z = estep_matrix(cfg.initial, ds, cfg, 1);
    CHECK(z.rows == 2);
    CHECK(z.cols == 2);
    // degenerate observation: constant row
    CHECK(z.at(0, 0) == 6.0);
    CHECK(z.at(0, 1) == 6.0);
    // right-censored exponential at the midpoint fractions {1/4, 3/4}
    CHECK(z.at(1, 0) == doctest::Approx(6.0 - std::log(0.75)).epsilon(1e-14));
    CHECK(z.at(1, 1) == doctest::Approx(6.0 - std::log(0.25)).epsilon(1e-14));
}

TEST_CASE("estep_matrix MCEM reproducibility") {
    const Dataset ds({{1.0, kInf}, {0.5, 2.0}});
    FitConfig cfg(ModelParams(ExponentialParams{1.0}));
    cfg.strategy = Strategy::mcem;
    cfg.grid_size = 16;
    cfg.seed = 12345;

    const auto z1 = estep_matrix(cfg.initial, ds, cfg, 3);
    const auto z2 = estep_matrix(cfg.initial, ds, cfg, 3);
    CHECK(z1.data == z2.data);
    const auto z3 = estep_matrix(cfg.initial, ds, cfg, 4); // fresh draws per iteration
    CHECK(z1.data != z3.data);
    cfg.seed = 54321;
    const auto z4 = estep_matrix(cfg.initial, ds, cfg, 3);
    CHECK(z1.data != z4.data);
}

TEST_CASE("estep_matrix zero-mass carries the observation index") {
    const Dataset ds({{1.0, 2.0}, {800.0, kInf}});
    FitConfig cfg(ModelParams(ExponentialParams{1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 4;
    try {
        estep_matrix(cfg.initial, ds, cfg, 1);
        FAIL("expected ZeroMassError");
    } catch (const ZeroMassError& e) {
        CHECK(e.obs_index() == 1);
    }
}

TEST_CASE("check_convergence") {
    const ModelParams a(NormalParams{1.0, 1.0});
    CHECK(check_convergence(a, a, 1e-12));
    CHECK_FALSE(check_convergence(a, ModelParams(NormalParams{1.1, 1.0}), 0.05));
    CHECK(check_convergence(a, ModelParams(NormalParams{1.001, 1.001}), 0.01));
    CHECK_THROWS_AS(check_convergence(a, ModelParams(ExponentialParams{1.0}), 0.1),
                    std::invalid_argument);
}

TEST_CASE("leukemia exact EM reaches the closed-form MLE") {
    FitConfig cfg(ModelParams(ExponentialParams{1.0}));
    cfg.strategy = Strategy::exact_em;
    cfg.epsilon = 1e-10;
    cfg.max_iterations = 10000;
    const auto r = run_fit(ModelTag::exponential, fixtures::leukemia(), cfg);
    CHECK(r.converged);
    CHECK(1.0 / r.estimate.exponential().rate == doctest::Approx(359.0 / 9.0).epsilon(1e-9));
    CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.loglik_trace.size() == r.trace.size());
}

TEST_CASE("censored normal sample: EM and QEM iterates match the reference table") {
    const double em_mu[10] = {1.8467, 1.8058, 1.7761, 1.7593, 1.7504,
                              1.7459, 1.7439, 1.7429, 1.7425, 1.7424};
    const double em_sigma[10] = {0.2968, 0.1931, 0.1370, 0.1070, 0.0919,
                                 0.0848, 0.0816, 0.0802, 0.0796, 0.0793};
    FitConfig cfg(ModelParams(NormalParams{0.0, 1.0}));
    cfg.strategy = Strategy::exact_em;
    cfg.epsilon = 1e-15;
    cfg.max_iterations = 10;
    const auto r = run_fit(ModelTag::normal, fixtures::gupta(), cfg);
    REQUIRE(r.iterations == 10);
    for (int s = 1; s <= 10; ++s) {
        CHECK(r.trace[s].normal().location == doctest::Approx(em_mu[s - 1]).epsilon(3e-5));
        CHECK(r.trace[s].normal().scale == doctest::Approx(em_sigma[s - 1]).epsilon(7e-4));
    }

    const double qem_mu1 = 1.8467, qem_sigma1 = 0.2966;
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 1000;
    const auto q = run_fit(ModelTag::normal, fixtures::gupta(), cfg);
    CHECK(q.trace[1].normal().location == doctest::Approx(qem_mu1).epsilon(3e-5));
    CHECK(q.trace[1].normal().scale == doctest::Approx(qem_sigma1).epsilon(7e-4));
    CHECK(q.trace[10].normal().location == doctest::Approx(1.7424).epsilon(3e-5));
    CHECK(q.trace[10].normal().scale == doctest::Approx(0.0793).epsilon(7e-4));
}

TEST_CASE("observed log-likelihood ascends under exact EM") {
    const CounterStream rng(61);
    int datasets = 0;
    for (int t = 0; t < 100; ++t) {
        const ModelTag tag = t % 2 == 0 ? ModelTag::exponential : ModelTag::normal;
        const Dataset ds = random_censored_dataset(tag, rng, t);
        FitConfig cfg(tag == ModelTag::exponential
                          ? ModelParams(ExponentialParams{2.0})
                          : ModelParams(NormalParams{0.0, 2.0}));
        cfg.strategy = Strategy::exact_em;
        cfg.epsilon = 1e-9;
        cfg.max_iterations = 60;
        FitResult r{cfg.initial, {}, {}, false, 0};
        try {
            r = run_fit(tag, ds, cfg);
        } catch (const FitError&) {
            continue; // collapsed dataset (all exact and equal): not this property's business
        }
        for (std::size_t s = 1; s < r.loglik_trace.size(); ++s)
            CHECK(r.loglik_trace[s] >=
                  r.loglik_trace[s - 1] - 1e-12 * (1.0 + std::fabs(r.loglik_trace[s - 1])));
        ++datasets;
    }
    CHECK(datasets > 90);
}

TEST_CASE("QEM fits are bit-deterministic") {
    FitConfig cfg(ModelParams(RayleighParams{1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 200;
    cfg.epsilon = 1e-8;
    cfg.max_iterations = 50;
    const auto a = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
    const auto b = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
    CHECK(bit_equal(a, b));
}

TEST_CASE("MCEM fits are bit-deterministic given a seed") {
    FitConfig cfg(ModelParams(RayleighParams{1.0}));
    cfg.strategy = Strategy::mcem;
    cfg.grid_size = 100;
    cfg.epsilon = 1e-8;
    cfg.max_iterations = 20;
    cfg.seed = 777;
    const auto a = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
    const auto b = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
    CHECK(bit_equal(a, b));
    cfg.seed = 778;
    const auto c = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
    CHECK_FALSE(bit_equal(a, c));
}

TEST_CASE("rayleigh QEM is robust to the starting point") {
    double estimates[2];
    int i = 0;
    for (double b0 : {1.0, 10.0}) {
        FitConfig cfg(ModelParams(RayleighParams{b0}));
        cfg.strategy = Strategy::qem;
        cfg.grid_size = 1000;
        cfg.epsilon = 1e-15;
        cfg.max_iterations = 10;
        const auto r = run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg);
        // first iterates from the reference table
        CHECK(r.trace[1].rayleigh().scale ==
              doctest::Approx(b0 == 1.0 ? 5.3358 : 7.2946).epsilon(2e-5));
        estimates[i++] = r.estimate.rayleigh().scale;
    }
    CHECK(std::fabs(estimates[0] - estimates[1]) <= 1e-4);
    CHECK(estimates[0] == doctest::Approx(6.1338).epsilon(2e-5));
}

TEST_CASE("QEM at K = 10^4 agrees with exact EM") {
    // leukemia, exponential
    {
        FitConfig em(ModelParams(ExponentialParams{1.0}));
        em.strategy = Strategy::exact_em;
        em.epsilon = 1e-10;
        em.max_iterations = 20000;
        const double exact =
            run_fit(ModelTag::exponential, fixtures::leukemia(), em).estimate.exponential().rate;
        em.strategy = Strategy::qem;
        em.grid_size = 10000;
        const double qem =
            run_fit(ModelTag::exponential, fixtures::leukemia(), em).estimate.exponential().rate;
        CHECK(qem == doctest::Approx(exact).epsilon(1e-4));
    }
    // censored normal sample
    {
        FitConfig em(ModelParams(NormalParams{0.0, 1.0}));
        em.strategy = Strategy::exact_em;
        em.epsilon = 1e-10;
        em.max_iterations = 20000;
        const auto exact = run_fit(ModelTag::normal, fixtures::gupta(), em).estimate.normal();
        em.strategy = Strategy::qem;
        em.grid_size = 10000;
        const auto qem = run_fit(ModelTag::normal, fixtures::gupta(), em).estimate.normal();
        CHECK(qem.location == doctest::Approx(exact.location).epsilon(1e-4));
        CHECK(qem.scale == doctest::Approx(exact.scale).epsilon(1e-4));
    }
}

TEST_CASE("quantile-grid order of accuracy, measured") {
    // right-censored conditional mean: the inverse CDF has a log singularity
    // at xi -> 1, so the midpoint-rule error is first order (error ~ ln2/2K),
    // shrinking ~10x per decade of K
    const ModelParams m(ExponentialParams{1.0});
    const IntervalObservation censored{6.0, kInf};
    auto grid_mean_error = [&](const IntervalObservation& obs, double closed_form, int K) {
        const TruncatedQuantileFn f(m, obs);
        double acc = 0.0;
        for (int k = 1; k <= K; ++k)
            acc += f((k - 0.5) / K);
        return std::fabs(acc / K - closed_form);
    };
    const double e1 = grid_mean_error(censored, 7.0, 100);
    const double e2 = grid_mean_error(censored, 7.0, 1000);
    const double e3 = grid_mean_error(censored, 7.0, 10000);
    CHECK(e1 / e2 == doctest::Approx(10.0).epsilon(0.2));
    CHECK(e2 / e3 == doctest::Approx(10.0).epsilon(0.2));
    CHECK(e1 == doctest::Approx(std::log(2.0) / 200.0).epsilon(0.02));

    // bounded intervals have no singularity: the classical second-order
    // midpoint rate shows up, ~100x per decade
    const IntervalObservation bounded{1.0, 3.0};
    const double closed = 1.0 + 1.0 - 2.0 / std::expm1(2.0);
    const double b1 = grid_mean_error(bounded, closed, 10);
    const double b2 = grid_mean_error(bounded, closed, 100);
    const double b3 = grid_mean_error(bounded, closed, 1000);
    CHECK(b1 / b2 >= 50.0);
    CHECK(b1 / b2 <= 200.0);
    CHECK(b2 / b3 >= 50.0);
    CHECK(b2 / b3 <= 200.0);
}

TEST_CASE("MCEM root-mean-square error shrinks like 1/sqrt(K)") {
    const ModelParams m(ExponentialParams{1.0});
    const Dataset ds({{6.0, kInf}});
    auto rms = [&](int K) {
        double acc = 0.0;
        const int seeds = 50;
        for (int s = 0; s < seeds; ++s) {
            FitConfig cfg(m);
            cfg.strategy = Strategy::mcem;
            cfg.grid_size = K;
            cfg.seed = 1000 + s;
            const auto z = estep_matrix(m, ds, cfg, 1);
            double mean = 0.0;
            for (double v : z.row(0))
                mean += v;
            mean /= K;
            acc += (mean - 7.0) * (mean - 7.0);
        }
        return std::sqrt(acc / seeds);
    };
    const double r1 = rms(100), r2 = rms(1000), r3 = rms(10000);
    CHECK(r1 / r2 >= 2.0);
    CHECK(r1 / r2 <= 5.0);
    CHECK(r2 / r3 >= 2.0);
    CHECK(r2 / r3 <= 5.0);
}

TEST_CASE("fit failures carry the partial trace") {
    // all observations exact and equal: the first normal M-step collapses
    const Dataset collapsed({{2.0, 2.0}, {2.0, 2.0}, {2.0, 2.0}});
    FitConfig cfg(ModelParams(NormalParams{0.0, 1.0}));
    cfg.strategy = Strategy::exact_em;
    try {
        run_fit(ModelTag::normal, collapsed, cfg);
        FAIL("expected FitError");
    } catch (const FitError& e) {
        CHECK(e.partial().iterations == 0);
        CHECK(e.partial().trace.size() == 1);
        CHECK_FALSE(e.partial().converged);
    }
}

TEST_CASE("config validation") {
    const Dataset ds({{1.0, 2.0}});
    FitConfig cfg(ModelParams(RayleighParams{1.0}));
    cfg.strategy = Strategy::exact_em; // not available for rayleigh
    CHECK_THROWS_AS(run_fit(ModelTag::rayleigh, ds, cfg), std::invalid_argument);

    FitConfig mismatch(ModelParams(ExponentialParams{1.0}));
    CHECK_THROWS_AS(run_fit(ModelTag::normal, ds, mismatch), std::invalid_argument);

    FitConfig bad_eps(ModelParams(ExponentialParams{1.0}));
    bad_eps.epsilon = 1.5;
    CHECK_THROWS_AS(run_fit(ModelTag::exponential, ds, bad_eps), std::invalid_argument);
}
