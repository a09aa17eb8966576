#pragma once

#include "ed/channel.hpp"
#include "ed/constellation.hpp"
#include "ed/ser_analysis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ed {

// Channel-knowledge contract of a simulation run. Slow fading lets the
// instantaneous-energy and coherent detectors observe the data-phase
// channel (training and data see the same realization); fast fading
// restricts every detector to the average channel energy.
enum class Regime { SlowFading, FastFading };

enum class DetectorVariant {
    Coherent,      // matched filter with full channel knowledge
    IedGaussian,   // energy detector, per-realization gaussian-approximation thresholds
    IedExactMap,   // energy detector, per-realization exact map thresholds
    AedGaussian,   // energy detector, average-energy gaussian thresholds
    AedBayesian,   // energy detector, average-energy bayesian thresholds
};

const char* detector_name(DetectorVariant v);
std::optional<DetectorVariant> parse_detector(const std::string& name);

enum class SweepAxis { Antennas, SnrDb };

struct ChannelSpec {
    bool sparse = false;
    double avg_energy = 1.0;
    // Sparse model only. paths == 0 tracks the antenna count of the sweep
    // point (the full-degree-of-freedom configuration).
    int paths = 0;
    bool line_of_sight = false;
    double rician_k_db = 0.0;
    PathProfile profile = PathProfile::Equal;
    double decay_rate = 1.0;
    double los_cos = 0.0;
};

struct Scenario {
    Constellation constellation = make_ook();
    ChannelSpec channel;
    Regime regime = Regime::SlowFading;
    std::vector<DetectorVariant> detectors{DetectorVariant::AedGaussian};
    SweepAxis axis = SweepAxis::Antennas;
    std::vector<double> sweep{100.0};
    int antennas = 100;   // fixed array size when sweeping the snr
    double snr_db = 0.0;  // fixed snr (avg channel energy over noise) when sweeping antennas
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    // Offset added to the point index when keying random streams; lets a
    // caller run several sweeps under one seed without reusing streams.
    std::uint32_t point_offset = 0;
};

// Throws std::invalid_argument naming the offending field.
void validate_scenario(const Scenario& s);

struct PointSpec {
    double axis_value = 0.0;
    int antennas = 0;
    double snr_db = 0.0;
    double noise_var = 0.0;
    int paths = 0;  // resolved sparse path count, 0 for the dense channel
};

PointSpec point_spec(const Scenario& s, int point_index);

struct PointResult {
    PointSpec point;
    // One report per scenario detector, in scenario order.
    std::vector<SerReport> reports;
};

// 95% confidence half-width of an empirical proportion (score interval).
Confidence wilson_confidence(std::int64_t errors, std::int64_t trials);

// Runs every trial of one sweep point, feeding the same symbol, channel,
// and noise draws to all requested detectors. Trials are partitioned into
// shard_count contiguous blocks that may execute on separate threads;
// every trial owns a counter-keyed random stream, so the result is
// bit-identical for any shard count.
PointResult run_point(const Scenario& s, int point_index, int shard_count = 1);

// Analytic symbol-error report for a detector over the dense Rayleigh
// channel; the reference curves plotted alongside Monte Carlo results.
SerReport analytic_reference(DetectorVariant v, const Constellation& c, int antennas,
                             double noise_var, double avg_energy);

struct SweepResult {
    std::vector<PointResult> points;
    // analytic[d][k]: Rayleigh reference for scenario detector d at sweep
    // point k (computed for sparse scenarios too, as the dense baseline).
    std::vector<std::vector<SerReport>> analytic;
};

SweepResult run_sweep(const Scenario& s, int shard_count = 1);

}  // namespace ed
