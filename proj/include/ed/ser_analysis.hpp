#pragma once

#include "ed/constellation.hpp"
#include "ed/detector.hpp"
#include "ed/probability.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace ed {

enum class SerMethod {
    IedExactMarcumQ,
    IedGaussian,
    AedExactChi2,
    AedChernoff,
    CoherentMatchedFilter,
    MonteCarlo,
};

struct Confidence {
    double half_width = 0.0;
    long long trials = 0;
};

// Per-symbol and prior-averaged error probabilities from one analysis
// method. approximation_valid is cleared by approximate methods when a
// precondition of the approximation fails (the values are still returned).
struct SerReport {
    std::vector<Probability> per_symbol;
    Probability average;
    SerMethod method = SerMethod::MonteCarlo;
    bool approximation_valid = true;
    std::optional<Confidence> confidence;
};

// Squared standardized distances from each boundary to the two conditional
// means it separates: gamma_u[p] looks up from symbol p, gamma_l[p] looks
// down from symbol p+1. These act as post-processing SNRs: the gaussian
// error terms are Q(sqrt(gamma)).
struct PostSnr {
    Eigen::ArrayXd gamma_u;
    Eigen::ArrayXd gamma_l;
};

PostSnr post_processing_snrs(const GaussianMoments& moments, const ThresholdSet& thresholds);

// Exact error probabilities of the energy statistic conditioned on the
// instantaneous channel energy: noncentral chi-square tails of 2Mz/noise_var
// with 2M degrees of freedom, evaluated against the given thresholds.
// Adjacent-boundary (nearest-neighbor) error assembly.
SerReport ied_exact_ser(double channel_energy, double noise_var, const Constellation& c,
                        int antennas, const ThresholdSet& thresholds);

// Gaussian approximation of the same conditional error probabilities,
// together with the post-processing SNRs that generate them.
struct GaussianSerAnalysis {
    SerReport report;
    PostSnr post_snr;
};
GaussianSerAnalysis ied_gaussian_ser(double channel_energy, double noise_var,
                                     const Constellation& c, int antennas,
                                     const ThresholdSet& thresholds);

// Exact error probabilities for detection on the channel-averaged statistic:
// with Rayleigh fading folded in, the statistic under symbol p is
// Gamma(M, (avg_channel_energy*e_p + noise_var)/M), so each tail is a
// regularized incomplete gamma value. Thresholds must not depend on the
// data-phase channel realization.
SerReport aed_exact_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                        int antennas, const ThresholdSet& thresholds);

// Chernoff bounds on the same gamma tails, computed in log domain:
// each tail term is (delta * e^(1-delta))^M with delta = threshold over
// conditional mean. Upper tails need delta > 1 and lower tails delta < 1;
// outside that regime the report is flagged approximation-invalid.
SerReport aed_chernoff_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                           int antennas, const ThresholdSet& thresholds);

// SNR-independent error floor of averaged-energy detection for P >= 3
// constellations: the high-SNR limit of the Chernoff tail sum, driven only
// by the energy ratios eta_p = sqrt(e_{p+1}/e_p) of interior boundaries.
// Two-level constellations have no floor (returns zero).
Probability pam_floor(const Constellation& c, int antennas);

// Closed-form average SER of coherent maximum-ratio combining over i.i.d.
// Rayleigh fading with midpoint amplitude thresholds; the adjacent-pair
// crossing probability is the classic diversity-M combining integral.
SerReport coherent_mrc_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                           int antennas);

// Expectation of per-symbol conditional error probabilities over the
// hardened channel-energy density (Gamma with shape M, mean
// avg_channel_energy). conditional(e) must return P error probabilities for
// instantaneous channel energy e. Composite Gauss-Legendre on geometric
// panels; panel layout resolves structure near scale_hint (pass the energy
// scale where the conditional changes fastest, or 0 for none).
Eigen::ArrayXd average_over_channel_energy(int antennas, double avg_channel_energy,
                                           double scale_hint,
                                           const std::function<Eigen::ArrayXd(double)>& conditional);

// Canonical spline table of exact MAP thresholds over the instantaneous
// channel-energy range that matters for a given average energy. Both the
// analytic channel average and the trial engine build their tables through
// this function so the two sides use identical thresholds.
IedThresholdInterpolant make_ied_map_interpolant(const Constellation& c, double noise_var,
                                                 int antennas, double avg_channel_energy);

// Channel-averaged exact SER of instantaneous-energy detection in slow
// fading: thresholds recomputed from each drawn channel energy under the
// given rule (IedGaussian or IedExactMap), exact conditional tails averaged
// over the Rayleigh energy density.
SerReport ied_average_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                          int antennas, ThresholdBasis rule);

// Equivalence of instantaneous-energy detection and coherent combining at
// high SNR, checked two ways. The closed-form high-SNR post-SNR of the
// energy detector (M*snr*kappa_p) is compared against the matched filter's
// post-SNR derived independently from its own amplitude-midpoint geometry;
// max_relative_gap measures their agreement. The post-SNRs the quadratic
// MAP rule actually achieves at this finite snr (unit channel energy) are
// reported alongside, and their worst deviation from the coherent values
// drives the regime flag: far below the asymptote the gap blows up and
// high_snr_regime goes false.
struct EquivalenceReport {
    Eigen::ArrayXd ied_gamma_u;       // finite-snr post-SNRs of the quadratic MAP rule
    Eigen::ArrayXd ied_gamma_l;
    Eigen::ArrayXd ied_gamma_limit;   // closed-form limit M*snr*kappa_p
    Eigen::ArrayXd coherent_gamma;    // matched-filter post-SNRs from midpoint geometry
    double max_relative_gap = 0.0;    // limit vs coherent
    double finite_snr_gap = 0.0;      // worst finite-snr deviation from coherent
    bool high_snr_regime = false;     // finite_snr_gap < 10%
};
EquivalenceReport highsnr_coherent_equivalence_check(const Constellation& c, int antennas,
                                                     double snr);

// Least-squares fit of log10(probability) against x. Points with zero
// probability are dropped; fewer than 3 usable points is an error.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points_used = 0;
};
SlopeFit slope_fit(const std::vector<std::pair<double, Probability>>& curve);

}  // namespace ed
