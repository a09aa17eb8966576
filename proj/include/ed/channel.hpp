#pragma once

#include "ed/rng.hpp"

#include <Eigen/Dense>

namespace ed {

struct ChannelRealization {
    Eigen::VectorXcd h;

    int antennas() const { return static_cast<int>(h.size()); }

    // Per-antenna average of |h_i|^2; the quantity the instantaneous
    // detector conditions on.
    double instantaneous_energy() const { return h.squaredNorm() / static_cast<double>(h.size()); }
};

// i.i.d. Rayleigh fading, h_i ~ CN(0, avg_energy).
ChannelRealization draw_rayleigh(int antennas, double avg_energy, PhiloxStream& rng);

enum class PathProfile { Equal, ExponentialDecay };

struct SparseSpec {
    int antennas = 0;
    int paths = 0;               // total path count, including the LOS path if present
    bool line_of_sight = false;
    double rician_k_db = 0.0;    // LOS-to-scattered power ratio in dB (LOS only)
    PathProfile profile = PathProfile::Equal;
    double decay_rate = 1.0;     // scattered power ~ e^{-decay_rate * l}
    double los_cos = 0.0;        // direction cosine of the LOS path
};

// Sparse multipath channel for a half-wavelength uniform linear array.
// n random paths sit on the direction-cosine grid c_l = -1 + 2l/n with
// steering entries v_m = e^{-j pi m c}; when paths == antennas (no LOS)
// the steering vectors are orthogonal and the channel is exactly i.i.d.
// Rayleigh. Total average power is normalized to 1. With line of sight,
// one deterministic broadside-configurable path carries K/(1+K) of the
// power and the remaining paths - 1 grid paths share 1/(1+K).
class SparseSampler {
public:
    explicit SparseSampler(const SparseSpec& spec);

    ChannelRealization draw(PhiloxStream& rng) const;

    const SparseSpec& spec() const { return spec_; }
    const Eigen::MatrixXcd& steering() const { return steering_; }
    const Eigen::VectorXd& path_power() const { return path_power_; }
    double los_power() const { return los_amplitude_ * los_amplitude_; }

private:
    SparseSpec spec_;
    Eigen::MatrixXcd steering_;      // antennas x random paths
    Eigen::VectorXd path_power_;     // variance of each random path gain
    Eigen::VectorXcd los_component_; // deterministic part of h
    double los_amplitude_ = 0.0;
};

ChannelRealization draw_sparse(const SparseSpec& spec, PhiloxStream& rng);

// Energy statistic z = (1/M) sum_i |h_i x + n_i|^2 for transmit amplitude
// x and per-antenna complex noise variance noise_var.
double collect_energy(const ChannelRealization& ch, double amplitude, double noise_var, PhiloxStream& rng);

// Same draw, additionally exposing the per-antenna samples y_i (used by
// the coherent reference detector).
double collect_energy_samples(const ChannelRealization& ch, double amplitude, double noise_var,
                              PhiloxStream& rng, Eigen::VectorXcd& y);

}  // namespace ed
