#pragma once

#include "ed/constellation.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace ed {

// Raised when a decision rule has no usable boundary (identical hypothesis
// densities, zero-energy channel at the matched filter, ...).
class DegenerateDecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ThresholdBasis {
    IedGaussian,        // Gaussian-approximation MAP on the instantaneous energy
    AedGaussian,        // same rule evaluated at the average channel energy
    AedBayesian,        // exact MAP for the averaged statistic's Gamma law
    IedExactMap,        // exact MAP for the instantaneous noncentral chi-square law
    HighSnr,            // closed-form high-SNR limits
    CoherentAmplitude,  // amplitude midpoints after matched filtering
    Manual,
};

struct GaussianMoments {
    Eigen::ArrayXd mean;
    Eigen::ArrayXd variance;
};

// Per-symbol Gaussian moments of the energy statistic given the symbol:
// mean = basis*e_p + noise_var, var = (noise_var/M)(2*basis*e_p + noise_var),
// where basis is the conditioning channel energy (instantaneous or average).
GaussianMoments energy_statistic_moments(double energy_basis, double noise_var,
                                         const Constellation& c, int antennas);

// Ordered decision boundaries between adjacent symbols. Boundaries may tie
// (an empty decision region, which extreme priors or very low SNR can
// produce) but never decrease.
class ThresholdSet {
public:
    ThresholdSet(Eigen::ArrayXd deltas, ThresholdBasis basis);

    int boundaries() const { return static_cast<int>(deltas_.size()); }
    double delta(int p) const { return deltas_[p]; }
    const Eigen::ArrayXd& deltas() const { return deltas_; }
    ThresholdBasis basis() const { return basis_; }

private:
    Eigen::ArrayXd deltas_;
    ThresholdBasis basis_;
};

// MAP boundary between Gaussian hypotheses N(m0, v0) with log prior lq0 and
// N(m1, v1) with log prior lq1, m1 > m0. Returns the upper crossing of the
// weighted densities inside [m0, m1]; when the weighted ratio does not
// change sign there the boundary clamps to the corresponding endpoint.
// Identical moments leave no boundary at all: degenerate error.
double gaussian_map_boundary(double m0, double v0, double lq0, double m1, double v1, double lq1);

ThresholdSet ied_gaussian_thresholds(double inst_energy, double noise_var,
                                     const Constellation& c, int antennas);
ThresholdSet aed_gaussian_thresholds(double avg_energy, double noise_var,
                                     const Constellation& c, int antennas);

// Exact MAP boundaries for the average-energy detector, whose statistic is
// Gamma(M, (avg_energy*e_p + noise_var)/M) under symbol p.
ThresholdSet aed_bayesian_thresholds(double avg_energy, double noise_var,
                                     const Constellation& c, int antennas);

// Closed-form high-SNR boundaries: noise_var*sqrt(e1*rho/2) below the zero
// level and basis*sqrt(e_p*e_{p+1}) between active levels.
ThresholdSet high_snr_thresholds(double energy_basis, double noise_var, const Constellation& c);

// Exact MAP boundaries for the instantaneous-energy detector, found by
// bisecting the noncentral chi-square log-likelihood ratio.
ThresholdSet ied_exact_map_thresholds(double inst_energy, double noise_var,
                                      const Constellation& c, int antennas);

// Cubic-spline interpolant of the exact instantaneous MAP boundaries as a
// function of the realized channel energy. Simulation and analysis share
// one instance, so both sides use identical boundaries by construction.
// Queries outside the tabulated range fall back to the direct solver.
class IedThresholdInterpolant {
public:
    IedThresholdInterpolant(const Constellation& c, double noise_var, int antennas,
                            double energy_lo, double energy_hi, int nodes = 160);

    ThresholdSet at(double inst_energy) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    Constellation constellation_;
    double noise_var_;
    int antennas_;
    double lo_, hi_, step_;
    // One spline per boundary: values and second derivatives on the grid.
    std::vector<Eigen::ArrayXd> values_;
    std::vector<Eigen::ArrayXd> second_;
};

// Amplitude midpoints for the coherent matched-filter detector.
ThresholdSet coherent_amplitude_thresholds(const Constellation& c);

// Symbol index whose region contains the statistic; a boundary belongs to
// the upper region.
int decide(double statistic, const ThresholdSet& thresholds);

// Matched-filter detection: projects y on h, slices the real part against
// amplitude midpoints. Throws on a zero channel.
int coherent_detect(const Eigen::VectorXcd& y, const Eigen::VectorXcd& h, const Constellation& c);

}  // namespace ed
