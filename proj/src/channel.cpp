#include "ed/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ed {

namespace {

void require_arg(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Steering vector for direction cosine c on a half-wavelength array.
Eigen::VectorXcd steering_vector(int antennas, double c) {
    Eigen::VectorXcd v(antennas);
    for (int m = 0; m < antennas; ++m) {
        double phase = -M_PI * m * c;
        v[m] = std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return v;
}

Eigen::VectorXd profile_weights(int n, PathProfile profile, double decay_rate, double total) {
    Eigen::VectorXd w(n);
    if (profile == PathProfile::Equal) {
        w.setConstant(1.0);
    } else {
        for (int l = 0; l < n; ++l) w[l] = std::exp(-decay_rate * l);
    }
    w *= total / w.sum();
    return w;
}

}  // namespace

ChannelRealization draw_rayleigh(int antennas, double avg_energy, PhiloxStream& rng) {
    require_arg(antennas >= 1, "draw_rayleigh: antennas must be >= 1");
    require_arg(avg_energy > 0.0 && std::isfinite(avg_energy), "draw_rayleigh: avg_energy must be positive");
    ChannelRealization ch;
    ch.h.resize(antennas);
    for (int i = 0; i < antennas; ++i) ch.h[i] = rng.cnormal(avg_energy);
    return ch;
}

SparseSampler::SparseSampler(const SparseSpec& spec) : spec_(spec) {
    require_arg(spec.antennas >= 1, "sparse channel: antennas must be >= 1");
    require_arg(spec.paths >= 1, "sparse channel: path count must be >= 1");
    require_arg(!spec.line_of_sight || spec.paths >= 2,
                "sparse channel: line of sight needs at least one scattered path");
    require_arg(spec.decay_rate >= 0.0, "sparse channel: decay rate must be non-negative");
    require_arg(spec.los_cos >= -1.0 && spec.los_cos <= 1.0,
                "sparse channel: LOS direction cosine must be in [-1, 1]");

    int n = spec.line_of_sight ? spec.paths - 1 : spec.paths;
    double scattered_total = 1.0;
    los_component_ = Eigen::VectorXcd::Zero(spec.antennas);
    if (spec.line_of_sight) {
        double k = std::pow(10.0, spec.rician_k_db / 10.0);
        los_amplitude_ = std::sqrt(k / (1.0 + k));
        scattered_total = 1.0 / (1.0 + k);
        los_component_ = los_amplitude_ * steering_vector(spec.antennas, spec.los_cos);
    }

    steering_.resize(spec.antennas, n);
    for (int l = 0; l < n; ++l) {
        double c = -1.0 + 2.0 * l / n;
        steering_.col(l) = steering_vector(spec.antennas, c);
    }
    path_power_ = profile_weights(n, spec.profile, spec.decay_rate, scattered_total);
}

ChannelRealization SparseSampler::draw(PhiloxStream& rng) const {
    Eigen::VectorXcd beta(path_power_.size());
    for (Eigen::Index l = 0; l < beta.size(); ++l) beta[l] = rng.cnormal(path_power_[l]);
    ChannelRealization ch;
    ch.h = los_component_ + steering_ * beta;
    return ch;
}

ChannelRealization draw_sparse(const SparseSpec& spec, PhiloxStream& rng) {
    return SparseSampler(spec).draw(rng);
}

double collect_energy(const ChannelRealization& ch, double amplitude, double noise_var, PhiloxStream& rng) {
    require_arg(amplitude >= 0.0 && std::isfinite(amplitude), "collect_energy: amplitude must be non-negative");
    require_arg(noise_var >= 0.0 && std::isfinite(noise_var), "collect_energy: noise_var must be non-negative");
    double acc = 0.0;
    for (int i = 0; i < ch.antennas(); ++i) {
        std::complex<double> y = ch.h[i] * amplitude + rng.cnormal(noise_var);
        acc += std::norm(y);
    }
    return acc / ch.antennas();
}

double collect_energy_samples(const ChannelRealization& ch, double amplitude, double noise_var,
                              PhiloxStream& rng, Eigen::VectorXcd& y) {
    require_arg(amplitude >= 0.0 && std::isfinite(amplitude), "collect_energy: amplitude must be non-negative");
    require_arg(noise_var >= 0.0 && std::isfinite(noise_var), "collect_energy: noise_var must be non-negative");
    y.resize(ch.antennas());
    double acc = 0.0;
    for (int i = 0; i < ch.antennas(); ++i) {
        y[i] = ch.h[i] * amplitude + rng.cnormal(noise_var);
        acc += std::norm(y[i]);
    }
    return acc / ch.antennas();
}

}  // namespace ed
