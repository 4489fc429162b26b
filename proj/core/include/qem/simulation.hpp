#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qem/em.hpp"
#include "qem/interval_data.hpp"
#include "qem/model.hpp"

namespace qem {

struct StudyCell {
    Strategy strategy;
    int grid_size; // ignored for exact EM
};

struct StudyConfig {
    ModelTag model;
    ModelParams truth;
    int sample_size;      // n
    int censored_count;   // r, Type-II: the largest r are censored
    int replications;
    std::vector<StudyCell> cells;
    int iterations_per_fit = 10;
    std::uint64_t base_seed = 0;
    int threads = 0; // 0 = hardware concurrency

    StudyConfig(ModelTag m, ModelParams t) : model(m), truth(t) {}
};

/// Type-II censoring transform: sorts the draws, keeps the smallest n-r
/// as exact observations and replaces the largest r by
/// [x_(n-r), +inf) -- censored at the largest observed order statistic.
Dataset type2_censor(std::vector<double> draws, int censored_count);

/// Draws n variates by inverse transform from the seeded counter stream,
/// then applies type2_censor. Same seed, same Dataset.
Dataset simulate_type2_censored(const ModelParams& truth, int n, int r, std::uint64_t seed);

struct CellSummary {
    StudyCell cell;
    bool is_reference = false;
    std::vector<double> bias; // mean(est - MLE) per parameter
    std::vector<double> mse;  // sample variance of (est - MLE), Table-comparable
    std::vector<double> msd;  // mean squared (est - MLE)
    std::vector<double> sre;  // reference-cell MSE / this cell's MSE
    std::size_t failures = 0;
    bool valid = true; // false when failures exceed 1% of replications
};

struct StudyTable {
    std::vector<std::string> parameter_names;
    std::vector<CellSummary> rows;
    int replications = 0;
    std::size_t reference_failures = 0; // replications whose MLE reference failed
};

/// Runs the full study: per replication, simulates a censored sample,
/// computes the converged MLE reference (exact-EM fixed point for
/// exponential/normal, grid-refined oracle otherwise) and each cell's
/// fixed-iteration estimate; aggregates bias/MSE/SRE with a deterministic
/// pairwise reduction. Replications run concurrently.
StudyTable run_study(const StudyConfig& config);

/// Machine-readable table: header
/// strategy,k,parameter,bias,mse,msd,sre,failures
std::string study_csv(const StudyTable& table);

/// Human-readable aligned-text table.
std::string study_text(const StudyTable& table);

} // namespace qem
