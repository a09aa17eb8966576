#pragma once

#include <Eigen/Core>

#include <vector>

namespace ed {

// Energy constellation for non-coherent signaling: strictly increasing
// per-symbol energies with positive priors. Energies are rescaled at
// construction so the prior-weighted mean energy equals 1, which ties
// transmit SNR to the channel and noise scales alone.
class Constellation {
public:
    Constellation(Eigen::ArrayXd energies, Eigen::ArrayXd priors);

    int size() const { return static_cast<int>(energies_.size()); }
    const Eigen::ArrayXd& energies() const { return energies_; }
    const Eigen::ArrayXd& priors() const { return priors_; }
    double energy(int p) const { return energies_[p]; }
    double prior(int p) const { return priors_[p]; }
    double amplitude(int p) const { return std::sqrt(energies_[p]); }
    double mean_energy() const { return (energies_ * priors_).sum(); }

private:
    Eigen::ArrayXd energies_;
    Eigen::ArrayXd priors_;
};

// On-off keying: energies {0, 2}, uniform priors.
Constellation make_ook();

// Non-negative PAM with amplitudes proportional to 0, 1, ..., levels-1,
// scaled to unit mean energy under the priors (uniform if omitted).
Constellation make_conventional_pam(int levels);
Constellation make_conventional_pam(int levels, const Eigen::ArrayXd& priors);

// Arbitrary energy levels and priors; validates ordering and positivity,
// then rescales to unit prior-weighted mean energy.
Constellation make_custom(const std::vector<double>& energies, const std::vector<double>& priors);

// Half squared amplitude gap ((sqrt(e[p+1]) - sqrt(e[p]))^2) / 2 for each
// adjacent pair; controls the high-SNR error exponent of that boundary.
Eigen::ArrayXd pair_kappas(const Constellation& c);

}  // namespace ed
