#include "ed/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace ed {

Constellation::Constellation(Eigen::ArrayXd energies, Eigen::ArrayXd priors)
    : energies_(std::move(energies)), priors_(std::move(priors)) {
    const auto n = energies_.size();
    if (n < 2) throw std::invalid_argument("constellation needs at least two energy levels");
    if (priors_.size() != n) throw std::invalid_argument("constellation priors must match energy count");
    for (Eigen::Index p = 0; p < n; ++p) {
        if (!std::isfinite(energies_[p]) || energies_[p] < 0.0)
            throw std::invalid_argument("constellation energies must be finite and non-negative");
        if (p > 0 && energies_[p] <= energies_[p - 1])
            throw std::invalid_argument("constellation energies must be strictly increasing");
        if (!std::isfinite(priors_[p]) || priors_[p] <= 0.0)
            throw std::invalid_argument("constellation priors must be positive");
    }
    double prior_sum = priors_.sum();
    if (std::fabs(prior_sum - 1.0) > 1e-12)
        throw std::invalid_argument("constellation priors must sum to 1");
    double mean = (energies_ * priors_).sum();
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("constellation mean energy must be positive");
    energies_ /= mean;  // normalize to unit prior-weighted mean energy
}

Constellation make_ook() {
    Eigen::ArrayXd e(2), q(2);
    e << 0.0, 2.0;
    q << 0.5, 0.5;
    return Constellation(e, q);
}

Constellation make_conventional_pam(int levels) {
    if (levels < 2) throw std::invalid_argument("PAM needs at least two levels");
    Eigen::ArrayXd q(levels);
    q.setConstant(1.0 / levels);
    return make_conventional_pam(levels, q);
}

Constellation make_conventional_pam(int levels, const Eigen::ArrayXd& priors) {
    if (levels < 2) throw std::invalid_argument("PAM needs at least two levels");
    Eigen::ArrayXd e(levels);
    for (int p = 0; p < levels; ++p) e[p] = static_cast<double>(p) * p;
    return Constellation(e, priors);
}

Constellation make_custom(const std::vector<double>& energies, const std::vector<double>& priors) {
    Eigen::ArrayXd e = Eigen::Map<const Eigen::ArrayXd>(energies.data(), static_cast<Eigen::Index>(energies.size()));
    Eigen::ArrayXd q = Eigen::Map<const Eigen::ArrayXd>(priors.data(), static_cast<Eigen::Index>(priors.size()));
    return Constellation(e, q);
}

Eigen::ArrayXd pair_kappas(const Constellation& c) {
    Eigen::ArrayXd k(c.size() - 1);
    for (int p = 0; p + 1 < c.size(); ++p) {
        double d = c.amplitude(p + 1) - c.amplitude(p);
        k[p] = 0.5 * d * d;
    }
    return k;
}

}  // namespace ed
