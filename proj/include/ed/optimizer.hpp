#pragma once

#include "ed/constellation.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace ed {

enum class DesignObjective {
    IedInstantaneousSer,  // gaussian-approximation SER at a fixed instantaneous channel energy
    MinimaxPostSnr,       // worst-case squared relative mismatch between paired post-processing SNRs
    AedAverageSer,        // exact chi-square SER of averaged-energy detection
};

struct OptimizationProblem {
    DesignObjective objective = DesignObjective::IedInstantaneousSer;
    // Instantaneous channel energy for the I-ED objectives, average channel
    // energy for the A-ED objective.
    double channel_energy = 1.0;
    double noise_var = 0.1;
    int antennas = 100;
    int levels = 4;
    Eigen::ArrayXd priors;  // empty selects uniform
    int max_sweeps = 200;
    double tolerance = 1e-10;
    int restarts = 5;
    std::uint64_t seed = 1;
    std::optional<Constellation> initial;  // default: conventional PAM
};

struct OptimizationResult {
    Constellation constellation;
    // Natural log of the average SER for the SER objectives; the worst
    // squared relative mismatch (gamma_l - gamma_u)^2 / (gamma_u * gamma_l)
    // for the minimax objective.
    double objective_value = 0.0;
    int iterations = 0;  // completed coordinate sweeps of the winning restart
    bool converged = false;
    std::vector<std::pair<int, double>> trace;  // (sweep, objective) of the winning restart
};

// Cyclic coordinate descent over the energy levels with a golden-section
// line search per coordinate; every candidate is renormalized to unit
// average power before evaluation and thresholds are recomputed from
// scratch at each evaluation. Jittered restarts (deterministic in the
// seed) hedge against local minima; the best restart wins, ties resolved
// toward the lowest restart index.
OptimizationResult optimize(const OptimizationProblem& problem);

// Convenience entry points fixing the objective tag.
OptimizationResult optimize_ied(OptimizationProblem problem);
OptimizationResult optimize_minimax_gamma(OptimizationProblem problem);
OptimizationResult optimize_aed(OptimizationProblem problem);

}  // namespace ed
