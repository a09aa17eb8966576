#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ed/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

using namespace ed;

namespace {

// 95% two-sided normal quantile used by the Wilson interval.
constexpr double kZ95 = 1.959963984540054;

Scenario base_scenario() {
    Scenario s;
    s.constellation = make_ook();
    s.regime = Regime::SlowFading;
    s.detectors = {DetectorVariant::AedGaussian};
    s.axis = SweepAxis::Antennas;
    s.sweep = {100.0};
    s.snr_db = 0.0;
    s.trials = 1000;
    s.seed = 1;
    return s;
}

bool reports_identical(const SerReport& a, const SerReport& b) {
    if (a.per_symbol.size() != b.per_symbol.size()) return false;
    for (std::size_t p = 0; p < a.per_symbol.size(); ++p)
        if (a.per_symbol[p].value != b.per_symbol[p].value) return false;
    if (a.average.value != b.average.value) return false;
    if (a.confidence.has_value() != b.confidence.has_value()) return false;
    if (a.confidence && a.confidence->half_width != b.confidence->half_width) return false;
    return true;
}

// MC estimate vs analytic value, in units of the MC standard error implied
// by the Wilson half-width.
double standard_errors_apart(const SerReport& mc, const SerReport& analytic) {
    const double se = mc.confidence->half_width / kZ95;
    return std::abs(mc.average.value - analytic.average.value) / se;
}

}  // namespace

TEST_CASE("detector names round trip through the parser") {
    for (DetectorVariant v : {DetectorVariant::Coherent, DetectorVariant::IedGaussian,
                              DetectorVariant::IedExactMap, DetectorVariant::AedGaussian,
                              DetectorVariant::AedBayesian}) {
        auto parsed = parse_detector(detector_name(v));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == v);
    }
    CHECK(!parse_detector("matched_filter").has_value());
    CHECK(!parse_detector("").has_value());
}

TEST_CASE("point specs resolve the sweep axis and noise variance") {
    Scenario s = base_scenario();
    s.sweep = {8.0, 200.0};
    s.snr_db = 3.0;

    PointSpec a = point_spec(s, 0);
    CHECK(a.antennas == 8);
    CHECK(a.snr_db == 3.0);
    CHECK(a.noise_var == doctest::Approx(1.0 / std::pow(10.0, 0.3)).epsilon(1e-12));
    CHECK(a.paths == 0);

    PointSpec b = point_spec(s, 1);
    CHECK(b.antennas == 200);
    CHECK(b.axis_value == 200.0);

    s.axis = SweepAxis::SnrDb;
    s.sweep = {-6.0, 0.0, 12.0};
    s.antennas = 64;
    PointSpec c = point_spec(s, 0);
    CHECK(c.antennas == 64);
    CHECK(c.snr_db == -6.0);
    CHECK(c.noise_var == doctest::Approx(std::pow(10.0, 0.6)).epsilon(1e-12));
    PointSpec d = point_spec(s, 2);
    CHECK(d.noise_var == doctest::Approx(std::pow(10.0, -1.2)).epsilon(1e-12));

    // Sparse channels with paths = 0 track the antenna count.
    s.axis = SweepAxis::Antennas;
    s.sweep = {16.0, 64.0};
    s.channel.sparse = true;
    s.channel.paths = 0;
    CHECK(point_spec(s, 0).paths == 16);
    CHECK(point_spec(s, 1).paths == 64);
    s.channel.paths = 9;
    CHECK(point_spec(s, 1).paths == 9);
}

TEST_CASE("wilson interval shrinks like the square root of the trial count") {
    Confidence small = wilson_confidence(50, 1000);
    Confidence large = wilson_confidence(200, 4000);
    CHECK(small.trials == 1000);
    CHECK(large.trials == 4000);
    CHECK(small.half_width > 0.0);
    // Quadrupling the trials at the same rate should halve the width.
    const double ratio = small.half_width / large.half_width;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));

    // Zero observed errors still gives a strictly positive width.
    CHECK(wilson_confidence(0, 1000).half_width > 0.0);
    CHECK(wilson_confidence(0, 1000).half_width < 0.01);

    // Closed form at p = 0.5 for a direct value check.
    const double n = 1000.0, z2 = kZ95 * kZ95;
    const double expect = (kZ95 / (1.0 + z2 / n)) *
                          std::sqrt(0.25 / n + z2 / (4.0 * n * n));
    CHECK(wilson_confidence(500, 1000).half_width == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("noiseless instantaneous detection never errs") {
    Scenario s = base_scenario();
    s.constellation = make_conventional_pam(4);
    s.detectors = {DetectorVariant::IedGaussian};
    s.sweep = {16.0};
    s.snr_db = 300.0;  // noise variance 1e-30
    s.trials = 2000;

    PointResult r = run_point(s, 0);
    CHECK(r.point.noise_var == doctest::Approx(1e-30).epsilon(1e-9));
    CHECK(r.reports.size() == 1);
    CHECK(r.reports[0].average.value == 0.0);
    for (const Probability& p : r.reports[0].per_symbol)
        CHECK(p.value == 0.0);
}

TEST_CASE("average-energy bayesian detection matches the exact analysis") {
    Scenario s = base_scenario();
    s.detectors = {DetectorVariant::AedBayesian};
    s.sweep = {100.0};
    s.snr_db = -6.0;
    s.trials = 150000;
    s.seed = 41;

    PointResult r = run_point(s, 0);
    SerReport analytic = analytic_reference(DetectorVariant::AedBayesian, s.constellation,
                                            100, r.point.noise_var, 1.0);
    // Exact average-energy error rate at this operating point is about 2.1e-2,
    // so 150k trials resolve it to a fraction of a percent.
    CHECK(analytic.average.value == doctest::Approx(2.11164631646394e-2).epsilon(1e-6));
    CHECK(standard_errors_apart(r.reports[0], analytic) < 3.0);

    // Conditional per-symbol rates agree with the analytic tails too.
    for (int p = 0; p < 2; ++p) {
        const double got = r.reports[0].per_symbol[p].value;
        const double want = analytic.per_symbol[p].value;
        CHECK(std::abs(got - want) / want < 0.10);
    }
}

TEST_CASE("all detectors share the same draws and seeds reproduce bit-identically") {
    Scenario s = base_scenario();
    s.constellation = make_conventional_pam(4);
    s.sweep = {32.0};
    s.snr_db = 6.0;
    s.trials = 4000;
    s.seed = 7;

    s.detectors = {DetectorVariant::AedGaussian};
    PointResult alone = run_point(s, 0);

    // Adding detectors (including the coherent one, which switches the
    // energy collector to the sample-exposing variant) must not perturb
    // the shared draw sequence.
    s.detectors = {DetectorVariant::Coherent, DetectorVariant::IedGaussian,
                   DetectorVariant::IedExactMap, DetectorVariant::AedGaussian,
                   DetectorVariant::AedBayesian};
    PointResult joint = run_point(s, 0);
    REQUIRE(joint.reports.size() == 5);
    CHECK(reports_identical(alone.reports[0], joint.reports[3]));

    // Same scenario, same seed: every report reproduces exactly.
    PointResult again = run_point(s, 0);
    for (int d = 0; d < 5; ++d)
        CHECK(reports_identical(joint.reports[d], again.reports[d]));

    // A different seed moves the estimates.
    s.seed = 8;
    PointResult moved = run_point(s, 0);
    CHECK(moved.reports[1].average.value != joint.reports[1].average.value);

    // Coherent combining should beat every energy detector here.
    for (int d = 1; d < 5; ++d)
        CHECK(joint.reports[0].average.value <= joint.reports[d].average.value);
}

TEST_CASE("shard partition does not change the counts") {
    Scenario s = base_scenario();
    s.constellation = make_conventional_pam(4);
    s.detectors = {DetectorVariant::AedGaussian, DetectorVariant::AedBayesian};
    s.sweep = {24.0};
    s.snr_db = 3.0;
    s.trials = 5001;  // deliberately not a multiple of the shard count
    s.seed = 13;

    PointResult one = run_point(s, 0, 1);
    PointResult three = run_point(s, 0, 3);
    PointResult seven = run_point(s, 0, 7);
    for (std::size_t d = 0; d < s.detectors.size(); ++d) {
        CHECK(reports_identical(one.reports[d], three.reports[d]));
        CHECK(reports_identical(one.reports[d], seven.reports[d]));
    }
}

TEST_CASE("full-rank sparse channel reproduces the rayleigh analytics") {
    Scenario s = base_scenario();
    s.channel.sparse = true;
    s.channel.paths = 0;  // track the antenna count: orthogonal steering, iid Rayleigh
    s.detectors = {DetectorVariant::AedGaussian};
    s.sweep = {16.0};
    s.snr_db = 0.0;
    s.trials = 60000;
    s.seed = 29;

    PointResult r = run_point(s, 0);
    CHECK(r.point.paths == 16);
    SerReport analytic = analytic_reference(DetectorVariant::AedGaussian, s.constellation,
                                            16, r.point.noise_var, 1.0);
    CHECK(standard_errors_apart(r.reports[0], analytic) < 3.0);
}

TEST_CASE("sweeps attach analytic references per detector and point") {
    Scenario s = base_scenario();
    s.detectors = {DetectorVariant::AedGaussian, DetectorVariant::AedBayesian};
    s.sweep = {8.0, 16.0};
    s.snr_db = 0.0;
    s.trials = 20000;
    s.seed = 3;

    SweepResult sw = run_sweep(s);
    REQUIRE(sw.points.size() == 2);
    REQUIRE(sw.analytic.size() == 2);
    REQUIRE(sw.analytic[0].size() == 2);

    // The attached references are the exact average-energy analyses.
    for (int i = 0; i < 2; ++i) {
        const PointSpec& pt = sw.points[i].point;
        SerReport direct = aed_exact_ser(1.0, pt.noise_var, s.constellation, pt.antennas,
                                         aed_gaussian_thresholds(1.0, pt.noise_var,
                                                                 s.constellation, pt.antennas));
        CHECK(sw.analytic[0][i].average.value == doctest::Approx(direct.average.value).epsilon(1e-12));
        // More antennas, fewer errors, both measured and predicted.
        if (i == 1) {
            CHECK(sw.analytic[0][1].average.value < sw.analytic[0][0].average.value);
            CHECK(sw.points[1].reports[0].average.value < sw.points[0].reports[0].average.value);
        }
        // MC tracks its own reference at both points.
        CHECK(standard_errors_apart(sw.points[i].reports[0], sw.analytic[0][i]) < 4.0);
        CHECK(standard_errors_apart(sw.points[i].reports[1], sw.analytic[1][i]) < 4.0);
    }

    // Point offsets decorrelate: shifting the offset changes the draws.
    Scenario shifted = s;
    shifted.point_offset = 50;
    PointResult moved = run_point(shifted, 0);
    CHECK(moved.reports[0].average.value != sw.points[0].reports[0].average.value);
}

TEST_CASE("scenario validation rejects malformed inputs") {
    Scenario ok = base_scenario();
    CHECK_NOTHROW(validate_scenario(ok));

    Scenario s = ok;
    s.trials = 0;
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.detectors.clear();
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.sweep.clear();
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.sweep = {16.0, 16.0};
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.sweep = {8.5};
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.axis = SweepAxis::SnrDb;
    s.sweep = {0.0, 6.0};
    s.antennas = 0;
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.channel.avg_energy = 0.0;
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.channel.sparse = true;
    s.channel.paths = -1;
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    s = ok;
    s.channel.sparse = true;
    s.channel.avg_energy = 2.0;
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    // Fast fading hides the instantaneous channel energy, so only the
    // average-energy detectors are allowed.
    s = ok;
    s.regime = Regime::FastFading;
    CHECK_NOTHROW(validate_scenario(s));
    s.detectors = {DetectorVariant::IedGaussian};
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);
    s.detectors = {DetectorVariant::Coherent};
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);
    s.detectors = {DetectorVariant::AedBayesian, DetectorVariant::IedExactMap};
    CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);

    CHECK_THROWS_AS(point_spec(ok, 1), std::invalid_argument);
    CHECK_THROWS_AS(point_spec(ok, -1), std::invalid_argument);
    CHECK_THROWS_AS(wilson_confidence(-1, 100), std::invalid_argument);
    CHECK_THROWS_AS(wilson_confidence(101, 100), std::invalid_argument);
    CHECK_THROWS_AS(wilson_confidence(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_point(ok, 0, 0), std::invalid_argument);
}
