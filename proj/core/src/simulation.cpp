#include "qem/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qem/oracle.hpp"
#include "qem/rng.hpp"
#include "qem/special_functions.hpp"

namespace qem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kSimStreamTag = 0x53494D44; // dataset draws
constexpr std::uint64_t kFitStreamTag = 0x4649545F; // per-cell MCEM seeds

ModelParams converged_reference(ModelTag tag, const ModelParams& truth, const Dataset& data) {
    if (tag == ModelTag::exponential || tag == ModelTag::normal) {
        FitConfig cfg(truth);
        cfg.strategy = Strategy::exact_em;
        cfg.epsilon = 1e-13;
        cfg.max_iterations = 100000;
        return run_fit(tag, data, cfg).estimate;
    }
    // no exact EM: brute-force oracle around the truth
    const auto tv = truth.values();
    ParamBox box;
    const auto names = param_names(tag);
    const double spread = tv.back(); // scale-type parameter is last
    for (std::size_t d = 0; d < tv.size(); ++d) {
        if (names[d] == "mu") {
            box.lower.push_back(tv[d] - 10.0 * spread);
            box.upper.push_back(tv[d] + 10.0 * spread);
        } else {
            box.lower.push_back(tv[d] / 20.0);
            box.upper.push_back(tv[d] * 20.0);
        }
    }
    return mle_grid_refine(tag, data, box);
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

Dataset type2_censor(std::vector<double> draws, int censored_count) {
    const int n = static_cast<int>(draws.size());
    if (n < 1 || censored_count < 0 || censored_count >= n)
        throw std::invalid_argument("type2_censor requires 0 <= r < n");
    std::sort(draws.begin(), draws.end());
    std::vector<IntervalObservation> obs;
    obs.reserve(draws.size());
    const int observed = n - censored_count;
    for (int i = 0; i < observed; ++i)
        obs.emplace_back(draws[i], draws[i]);
    const double threshold = draws[observed - 1];
    for (int i = observed; i < n; ++i)
        obs.emplace_back(threshold, std::numeric_limits<double>::infinity());
    return Dataset(std::move(obs));
}

Dataset simulate_type2_censored(const ModelParams& truth, int n, int r, std::uint64_t seed) {
    if (n < 1 || r < 0 || r >= n)
        throw std::invalid_argument("simulate_type2_censored requires 0 <= r < n");
    const CounterStream stream(CounterStream::derive_key(seed, kSimStreamTag));
    std::vector<double> draws(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        draws[static_cast<std::size_t>(i)] =
            quantile(truth, stream.uniform01(0, static_cast<std::uint64_t>(i), 0));
    return type2_censor(std::move(draws), r);
}

StudyTable run_study(const StudyConfig& config) {
    if (config.replications < 1)
        throw std::invalid_argument("study requires replications >= 1");
    if (config.cells.empty())
        throw std::invalid_argument("study requires at least one cell");
    if (config.truth.tag() != config.model)
        throw std::invalid_argument("true parameters do not match the study model");
    for (const auto& cell : config.cells)
        if (cell.strategy == Strategy::exact_em && config.model != ModelTag::exponential &&
            config.model != ModelTag::normal)
            throw std::invalid_argument("exact EM cells require an exponential or normal model");

    const std::size_t P = param_count(config.model);
    const std::size_t R = static_cast<std::size_t>(config.replications);
    const std::size_t C = config.cells.size();

    const bool solo_exact_em =
        std::all_of(config.cells.begin(), config.cells.end(),
                    [](const StudyCell& c) { return c.strategy == Strategy::exact_em; });

    // diffs[c][rep*P + p]; NaN marks a failed fit
    std::vector<std::vector<double>> diffs(C, std::vector<double>(R * P, kNaN));
    std::vector<char> ref_failed(R, 0);

    auto run_replication = [&](std::size_t rep) {
        const std::uint64_t data_seed =
            CounterStream::derive_key(config.base_seed, 2 * static_cast<std::uint64_t>(rep));
        const std::uint64_t fit_seed_base =
            CounterStream::derive_key(config.base_seed, 2 * static_cast<std::uint64_t>(rep) + 1);

        Dataset data = simulate_type2_censored(config.truth, config.sample_size,
                                               config.censored_count, data_seed);

        std::vector<std::vector<double>> estimates(C);
        for (std::size_t c = 0; c < C; ++c) {
            FitConfig cfg(config.truth);
            cfg.strategy = config.cells[c].strategy;
            cfg.grid_size = std::max(1, config.cells[c].grid_size);
            cfg.epsilon = 1e-15; // paper design: run the full iteration budget
            cfg.max_iterations = config.iterations_per_fit;
            cfg.seed = mix64(fit_seed_base ^ static_cast<std::uint64_t>(c));
            try {
                estimates[c] = run_fit(config.model, data, cfg).estimate.values();
            } catch (const std::exception&) {
                // leave empty: counted as a cell failure
            }
        }

        std::vector<double> ref;
        if (solo_exact_em) {
            ref = estimates[0]; // reference self-consistency: the cell is its own MLE stand-in
        } else {
            try {
                ref = converged_reference(config.model, config.truth, data).values();
            } catch (const std::exception&) {
            }
        }
        if (ref.empty()) {
            ref_failed[rep] = 1;
            return;
        }
        for (std::size_t c = 0; c < C; ++c) {
            if (estimates[c].empty())
                continue;
            for (std::size_t p = 0; p < P; ++p)
                diffs[c][rep * P + p] = estimates[c][p] - ref[p];
        }
    };

    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(R));
    std::atomic<std::size_t> next_rep{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t rep = next_rep.fetch_add(1); rep < R; rep = next_rep.fetch_add(1))
                run_replication(rep);
        });
    for (auto& t : pool)
        t.join();

    StudyTable table;
    table.replications = config.replications;
    for (const auto name : param_names(config.model))
        table.parameter_names.emplace_back(name);
    for (std::size_t rep = 0; rep < R; ++rep)
        table.reference_failures += ref_failed[rep];
    const std::size_t effective = R - table.reference_failures;

    // reference cell: first exact-EM cell, else the QEM cell with the largest K
    std::size_t ref_cell = 0;
    bool have_ref = false;
    for (std::size_t c = 0; c < C; ++c)
        if (config.cells[c].strategy == Strategy::exact_em) {
            ref_cell = c;
            have_ref = true;
            break;
        }
    if (!have_ref) {
        int best_k = -1;
        for (std::size_t c = 0; c < C; ++c)
            if (config.cells[c].strategy == Strategy::qem && config.cells[c].grid_size > best_k) {
                ref_cell = c;
                best_k = config.cells[c].grid_size;
                have_ref = true;
            }
    }

    table.rows.resize(C);
    std::vector<std::vector<double>> cell_mse(C, std::vector<double>(P, 0.0));
    for (std::size_t c = 0; c < C; ++c) {
        CellSummary& row = table.rows[c];
        row.cell = config.cells[c];
        row.is_reference = have_ref && c == ref_cell;
        row.bias.assign(P, kNaN);
        row.mse.assign(P, kNaN);
        row.msd.assign(P, kNaN);
        row.sre.assign(P, kNaN);

        std::vector<double> ok; // diffs with failures dropped, replication order
        ok.reserve(effective);
        for (std::size_t p = 0; p < P; ++p) {
            ok.clear();
            for (std::size_t rep = 0; rep < R; ++rep) {
                if (ref_failed[rep])
                    continue;
                const double d = diffs[c][rep * P + p];
                if (!std::isnan(d))
                    ok.push_back(d);
            }
            if (p == 0)
                row.failures = effective - ok.size();
            if (ok.empty())
                continue;
            const double count = static_cast<double>(ok.size());
            const double bias = pairwise_sum(ok) / count;
            std::vector<double> centered(ok.size()), squared(ok.size());
            for (std::size_t j = 0; j < ok.size(); ++j) {
                centered[j] = (ok[j] - bias) * (ok[j] - bias);
                squared[j] = ok[j] * ok[j];
            }
            row.bias[p] = bias;
            row.mse[p] = ok.size() > 1 ? pairwise_sum(centered) / (count - 1.0) : 0.0;
            row.msd[p] = pairwise_sum(squared) / count;
            cell_mse[c][p] = row.mse[p];
        }
        row.valid = row.failures <= static_cast<std::size_t>(0.01 * static_cast<double>(effective));
    }
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t p = 0; p < P; ++p) {
            if (!have_ref)
                continue;
            if (c == ref_cell)
                table.rows[c].sre[p] = 1.0;
            else
                table.rows[c].sre[p] = cell_mse[ref_cell][p] / cell_mse[c][p];
        }
    return table;
}

std::string study_csv(const StudyTable& table) {
    std::string out = "strategy,k,parameter,bias,mse,msd,sre,failures\n";
    for (const auto& row : table.rows) {
        const int k = row.cell.strategy == Strategy::exact_em ? 0 : row.cell.grid_size;
        for (std::size_t p = 0; p < table.parameter_names.size(); ++p) {
            out += std::string(strategy_name(row.cell.strategy)) + "," + std::to_string(k) + "," +
                   table.parameter_names[p] + "," + format_double(row.bias[p]) + "," +
                   format_double(row.mse[p]) + "," + format_double(row.msd[p]) + "," +
                   format_double(row.sre[p]) + "," + std::to_string(row.failures) + "\n";
        }
    }
    return out;
}

std::string study_text(const StudyTable& table) {
    std::ostringstream os;
    os << "replications: " << table.replications;
    if (table.reference_failures > 0)
        os << "  (reference failures: " << table.reference_failures << ")";
    os << "\n";
    os << "  strategy      K  parameter          bias           mse           msd           sre  failures\n";
    for (const auto& row : table.rows) {
        for (std::size_t p = 0; p < table.parameter_names.size(); ++p) {
            char line[160];
            std::snprintf(line, sizeof(line), "  %-8s %6d  %-9s %13.6e %13.6e %13.6e %13.6e  %8zu%s\n",
                          std::string(strategy_name(row.cell.strategy)).c_str(),
                          row.cell.strategy == Strategy::exact_em ? 0 : row.cell.grid_size,
                          table.parameter_names[p].c_str(), row.bias[p], row.mse[p], row.msd[p],
                          row.sre[p], row.failures, row.valid ? "" : "  INVALID");
            os << line;
        }
    }
    return os.str();
}

} // namespace qem
