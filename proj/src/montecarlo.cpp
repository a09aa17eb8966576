#include "ed/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>

namespace ed {

namespace {

// Stream purpose tag for data-phase trials; keeps simulation draws disjoint
// from any other consumer of the same seed.
constexpr std::uint32_t kTrialPurpose = 11;

// Two-sided 95% normal quantile.
constexpr double kZ95 = 1.959963984540054;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// Per-shard tallies. Sent counts are shared across detectors (every
// detector sees the same draws); error counts are per detector.
struct ShardCounts {
    std::vector<std::int64_t> sent;                     // [symbol]
    std::vector<std::int64_t> errors;                   // [detector]
    std::vector<std::vector<std::int64_t>> wrong;       // [detector][symbol]
};

}  // namespace

const char* detector_name(DetectorVariant v) {
    switch (v) {
        case DetectorVariant::Coherent: return "coherent";
        case DetectorVariant::IedGaussian: return "ied_gaussian";
        case DetectorVariant::IedExactMap: return "ied_exact_map";
        case DetectorVariant::AedGaussian: return "aed_gaussian";
        case DetectorVariant::AedBayesian: return "aed_bayesian";
    }
    return "unknown";
}

std::optional<DetectorVariant> parse_detector(const std::string& name) {
    for (DetectorVariant v : {DetectorVariant::Coherent, DetectorVariant::IedGaussian,
                              DetectorVariant::IedExactMap, DetectorVariant::AedGaussian,
                              DetectorVariant::AedBayesian}) {
        if (name == detector_name(v)) return v;
    }
    return std::nullopt;
}

void validate_scenario(const Scenario& s) {
    require(!s.detectors.empty(), "scenario needs at least one detector");
    require(s.trials >= 1, "trials must be at least 1");
    require(s.trials <= 0xFFFFFFFFll, "trials exceed the per-point stream counter range");
    require(!s.sweep.empty(), "sweep must contain at least one point");
    require(s.sweep.size() <= 0xFFFFFFFFull - s.point_offset,
            "sweep points overflow the point counter range");
    for (std::size_t i = 0; i + 1 < s.sweep.size(); ++i)
        require(s.sweep[i] < s.sweep[i + 1], "sweep values must be strictly increasing");
    if (s.axis == SweepAxis::Antennas) {
        for (double v : s.sweep)
            require(v >= 1.0 && v == std::floor(v) && v <= 1e6,
                    "antenna sweep values must be positive integers");
    } else {
        require(s.antennas >= 1, "antenna count must be at least 1");
        for (double v : s.sweep)
            require(std::isfinite(v), "snr sweep values must be finite");
    }
    require(std::isfinite(s.snr_db), "snr must be finite");
    require(s.channel.avg_energy > 0.0 && std::isfinite(s.channel.avg_energy),
            "average channel energy must be positive");
    if (s.channel.sparse) {
        require(s.channel.paths >= 0, "path count must be non-negative");
        if (s.channel.profile == PathProfile::ExponentialDecay)
            require(s.channel.decay_rate > 0.0, "decay rate must be positive");
        require(s.channel.los_cos >= -1.0 && s.channel.los_cos <= 1.0,
                "line-of-sight direction cosine must lie in [-1, 1]");
        require(s.channel.avg_energy == 1.0,
                "sparse channels normalize total power to one; set avg_energy = 1");
    }
    if (s.regime == Regime::FastFading) {
        for (DetectorVariant v : s.detectors)
            require(v == DetectorVariant::AedGaussian || v == DetectorVariant::AedBayesian,
                    "fast fading leaves only the average channel energy observable; "
                    "coherent and instantaneous-energy detectors need slow fading");
    }
}

PointSpec point_spec(const Scenario& s, int point_index) {
    require(point_index >= 0 && point_index < static_cast<int>(s.sweep.size()),
            "sweep point index out of range");
    PointSpec pt;
    pt.axis_value = s.sweep[point_index];
    if (s.axis == SweepAxis::Antennas) {
        pt.antennas = static_cast<int>(s.sweep[point_index]);
        pt.snr_db = s.snr_db;
    } else {
        pt.antennas = s.antennas;
        pt.snr_db = s.sweep[point_index];
    }
    pt.noise_var = s.channel.avg_energy / std::pow(10.0, pt.snr_db / 10.0);
    if (s.channel.sparse)
        pt.paths = s.channel.paths > 0 ? s.channel.paths : pt.antennas;
    else
        pt.paths = 0;
    return pt;
}

Confidence wilson_confidence(std::int64_t errors, std::int64_t trials) {
    require(trials >= 1, "trials must be at least 1");
    require(errors >= 0 && errors <= trials, "error count out of range");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = kZ95 * kZ95;
    const double half = (kZ95 / (1.0 + z2 / n)) *
                        std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    Confidence ci;
    ci.half_width = half;
    ci.trials = trials;
    return ci;
}

PointResult run_point(const Scenario& s, int point_index, int shard_count) {
    validate_scenario(s);
    require(shard_count >= 1, "shard count must be at least 1");
    const PointSpec pt = point_spec(s, point_index);

    const Constellation& c = s.constellation;
    const int m = pt.antennas;
    const double nv = pt.noise_var;
    const double avg = s.channel.avg_energy;
    const int levels = c.size();
    const int det_count = static_cast<int>(s.detectors.size());

    // Fixed per-point machinery: average-energy thresholds and the
    // exact-MAP spline depend only on (constellation, noise, array size),
    // so they are built once, outside the trial loop, and shared read-only
    // across shards.
    std::optional<ThresholdSet> aed_gauss;
    std::optional<ThresholdSet> aed_bayes;
    std::optional<IedThresholdInterpolant> ied_map;
    bool need_samples = false;
    for (DetectorVariant v : s.detectors) {
        switch (v) {
            case DetectorVariant::Coherent:
                need_samples = true;
                break;
            case DetectorVariant::AedGaussian:
                if (!aed_gauss) aed_gauss = aed_gaussian_thresholds(avg, nv, c, m);
                break;
            case DetectorVariant::AedBayesian:
                if (!aed_bayes) aed_bayes = aed_bayesian_thresholds(avg, nv, c, m);
                break;
            case DetectorVariant::IedExactMap: {
                if (!ied_map) {
                    const double lo = 0.02 * avg;
                    const double hi = avg * (40.0 + m + 10.0 * std::sqrt(static_cast<double>(m))) / m;
                    ied_map.emplace(c, nv, m, lo, hi);
                }
                break;
            }
            case DetectorVariant::IedGaussian:
                break;
        }
    }

    std::optional<SparseSampler> sparse;
    if (s.channel.sparse) {
        SparseSpec spec;
        spec.antennas = m;
        spec.paths = pt.paths;
        spec.line_of_sight = s.channel.line_of_sight;
        spec.rician_k_db = s.channel.rician_k_db;
        spec.profile = s.channel.profile;
        spec.decay_rate = s.channel.decay_rate;
        spec.los_cos = s.channel.los_cos;
        sparse.emplace(spec);
    }

    // Cumulative prior for symbol selection; the top entry is pinned to
    // one so u in (0, 1] always lands on a symbol.
    std::vector<double> cum(levels);
    double acc = 0.0;
    for (int p = 0; p < levels; ++p) {
        acc += c.prior(p);
        cum[p] = acc;
    }
    cum[levels - 1] = 1.0;

    const std::int64_t trials = s.trials;
    const std::uint32_t point_key = s.point_offset + static_cast<std::uint32_t>(point_index);

    std::vector<ShardCounts> tallies(shard_count);
    for (ShardCounts& t : tallies) {
        t.sent.assign(levels, 0);
        t.errors.assign(det_count, 0);
        t.wrong.assign(det_count, std::vector<std::int64_t>(levels, 0));
    }

    auto worker = [&](int shard) {
        ShardCounts& mine = tallies[shard];
        Eigen::VectorXcd y;
        const std::int64_t lo = trials * shard / shard_count;
        const std::int64_t hi = trials * (shard + 1) / shard_count;
        for (std::int64_t t = lo; t < hi; ++t) {
            // One counter-keyed stream per trial: results are identical for
            // any shard partition of the same trial range.
            PhiloxStream rng(s.seed, kTrialPurpose, point_key, static_cast<std::uint32_t>(t));
            const double u = rng.uniform();
            int p = 0;
            while (p + 1 < levels && u > cum[p]) ++p;
            const double amp = c.amplitude(p);
            const ChannelRealization ch = sparse ? sparse->draw(rng) : draw_rayleigh(m, avg, rng);
            double z;
            if (need_samples)
                z = collect_energy_samples(ch, amp, nv, rng, y);
            else
                z = collect_energy(ch, amp, nv, rng);
            mine.sent[p] += 1;
            for (int d = 0; d < det_count; ++d) {
                int decided;
                switch (s.detectors[d]) {
                    case DetectorVariant::Coherent:
                        decided = coherent_detect(y, ch.h, c);
                        break;
                    case DetectorVariant::IedGaussian:
                        decided = decide(z, ied_gaussian_thresholds(ch.instantaneous_energy(), nv, c, m));
                        break;
                    case DetectorVariant::IedExactMap:
                        decided = decide(z, ied_map->at(ch.instantaneous_energy()));
                        break;
                    case DetectorVariant::AedGaussian:
                        decided = decide(z, *aed_gauss);
                        break;
                    case DetectorVariant::AedBayesian:
                    default:
                        decided = decide(z, *aed_bayes);
                        break;
                }
                if (decided != p) {
                    mine.errors[d] += 1;
                    mine.wrong[d][p] += 1;
                }
            }
        }
    };

    if (shard_count == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(shard_count);
        for (int shard = 0; shard < shard_count; ++shard)
            pool.emplace_back(worker, shard);
        for (std::thread& th : pool) th.join();
    }

    std::vector<std::int64_t> sent(levels, 0);
    for (const ShardCounts& t : tallies)
        for (int p = 0; p < levels; ++p) sent[p] += t.sent[p];

    PointResult out;
    out.point = pt;
    out.reports.reserve(det_count);
    for (int d = 0; d < det_count; ++d) {
        std::int64_t errors = 0;
        std::vector<std::int64_t> wrong(levels, 0);
        for (const ShardCounts& t : tallies) {
            errors += t.errors[d];
            for (int p = 0; p < levels; ++p) wrong[p] += t.wrong[d][p];
        }
        SerReport r;
        r.method = SerMethod::MonteCarlo;
        r.per_symbol.resize(levels);
        for (int p = 0; p < levels; ++p) {
            r.per_symbol[p] = sent[p] > 0
                ? Probability::from_linear(static_cast<double>(wrong[p]) / static_cast<double>(sent[p]))
                : Probability::zero();
        }
        r.average = Probability::from_linear(static_cast<double>(errors) / static_cast<double>(trials));
        r.confidence = wilson_confidence(errors, trials);
        out.reports.push_back(std::move(r));
    }
    return out;
}

SerReport analytic_reference(DetectorVariant v, const Constellation& c, int antennas,
                             double noise_var, double avg_energy) {
    switch (v) {
        case DetectorVariant::Coherent:
            return coherent_mrc_ser(avg_energy, noise_var, c, antennas);
        case DetectorVariant::IedGaussian:
            return ied_average_ser(avg_energy, noise_var, c, antennas, ThresholdBasis::IedGaussian);
        case DetectorVariant::IedExactMap:
            return ied_average_ser(avg_energy, noise_var, c, antennas, ThresholdBasis::IedExactMap);
        case DetectorVariant::AedGaussian:
            return aed_exact_ser(avg_energy, noise_var, c, antennas,
                                 aed_gaussian_thresholds(avg_energy, noise_var, c, antennas));
        case DetectorVariant::AedBayesian:
        default:
            return aed_exact_ser(avg_energy, noise_var, c, antennas,
                                 aed_bayesian_thresholds(avg_energy, noise_var, c, antennas));
    }
}

SweepResult run_sweep(const Scenario& s, int shard_count) {
    validate_scenario(s);
    SweepResult out;
    const int points = static_cast<int>(s.sweep.size());
    out.points.reserve(points);
    for (int i = 0; i < points; ++i)
        out.points.push_back(run_point(s, i, shard_count));
    out.analytic.resize(s.detectors.size());
    for (std::size_t d = 0; d < s.detectors.size(); ++d) {
        out.analytic[d].reserve(points);
        for (int i = 0; i < points; ++i) {
            const PointSpec& pt = out.points[i].point;
            out.analytic[d].push_back(analytic_reference(s.detectors[d], s.constellation,
                                                         pt.antennas, pt.noise_var,
                                                         s.channel.avg_energy));
        }
    }
    return out;
}

}  // namespace ed
