#include "ed/detector.hpp"

#include "ed/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace ed {

namespace {

void require_arg(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

GaussianMoments energy_statistic_moments(double energy_basis, double noise_var,
                                         const Constellation& c, int antennas) {
    require_arg(energy_basis >= 0.0 && std::isfinite(energy_basis),
                "energy_statistic_moments: energy basis must be non-negative");
    require_arg(noise_var > 0.0 && std::isfinite(noise_var),
                "energy_statistic_moments: noise variance must be positive");
    require_arg(antennas >= 1, "energy_statistic_moments: antennas must be >= 1");
    GaussianMoments m;
    m.mean = energy_basis * c.energies() + noise_var;
    m.variance = (noise_var / antennas) * (2.0 * energy_basis * c.energies() + noise_var);
    return m;
}

ThresholdSet::ThresholdSet(Eigen::ArrayXd deltas, ThresholdBasis basis)
    : deltas_(std::move(deltas)), basis_(basis) {
    require_arg(deltas_.size() >= 1, "threshold set needs at least one boundary");
    for (Eigen::Index p = 0; p < deltas_.size(); ++p) {
        require_arg(std::isfinite(deltas_[p]), "thresholds must be finite");
        if (p > 0)
            require_arg(deltas_[p] >= deltas_[p - 1], "thresholds must be non-decreasing");
    }
}

double gaussian_map_boundary(double m0, double v0, double lq0, double m1, double v1, double lq1) {
    require_arg(v0 > 0.0 && v1 > 0.0, "gaussian_map_boundary: variances must be positive");
    require_arg(m1 >= m0, "gaussian_map_boundary: means must be ordered");
    if (m0 == m1 && v0 == v1)
        throw DegenerateDecisionError("identical hypothesis densities have no decision boundary");

    // Sign convention: g(z) > 0 favors the upper hypothesis.
    const double a = 1.0 / v0 - 1.0 / v1;
    const double b = -2.0 * (m0 / v0 - m1 / v1);
    const double cc = m0 * m0 / v0 - m1 * m1 / v1 + std::log(v0 / v1) + 2.0 * (lq1 - lq0);
    auto g = [&](double z) { return (a * z + b) * z + cc; };

    const double g0 = g(m0), g1 = g(m1);
    const double slack = 1e-12 * (m1 - m0 + std::fabs(m1));

    if (a == 0.0) {
        if (b == 0.0)
            throw DegenerateDecisionError("constant likelihood ratio has no decision boundary");
        double z = -cc / b;
        return std::clamp(z, m0, m1);
    }

    double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        double q = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
        double roots[2] = {q / a, q != 0.0 ? cc / q : q / a};
        double pick = std::numeric_limits<double>::quiet_NaN();
        for (double r : roots) {
            if (std::isfinite(r) && r >= m0 - slack && r <= m1 + slack) {
                if (!std::isfinite(pick) || r > pick) pick = r;
            }
        }
        if (std::isfinite(pick)) return std::clamp(pick, m0, m1);
    }
    // No crossing inside [m0, m1]: the weighted ratio is one-signed there.
    if (g1 <= 0.0) return m1;  // lower hypothesis holds through the whole span
    if (g0 >= 0.0) return m0;  // upper hypothesis holds through the whole span
    // Sign change present but the closed form missed it numerically.
    double lo = m0, hi = m1;
    for (int i = 0; i < 90; ++i) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

ThresholdSet gaussian_thresholds(double basis, double noise_var, const Constellation& c,
                                 int antennas, ThresholdBasis tag) {
    GaussianMoments m = energy_statistic_moments(basis, noise_var, c, antennas);
    Eigen::ArrayXd d(c.size() - 1);
    for (int p = 0; p + 1 < c.size(); ++p) {
        d[p] = gaussian_map_boundary(m.mean[p], m.variance[p], std::log(c.prior(p)),
                                     m.mean[p + 1], m.variance[p + 1], std::log(c.prior(p + 1)));
    }
    return ThresholdSet(d, tag);
}

}  // namespace

ThresholdSet ied_gaussian_thresholds(double inst_energy, double noise_var,
                                     const Constellation& c, int antennas) {
    return gaussian_thresholds(inst_energy, noise_var, c, antennas, ThresholdBasis::IedGaussian);
}

ThresholdSet aed_gaussian_thresholds(double avg_energy, double noise_var,
                                     const Constellation& c, int antennas) {
    return gaussian_thresholds(avg_energy, noise_var, c, antennas, ThresholdBasis::AedGaussian);
}

ThresholdSet aed_bayesian_thresholds(double avg_energy, double noise_var,
                                     const Constellation& c, int antennas) {
    require_arg(avg_energy > 0.0 && std::isfinite(avg_energy),
                "aed_bayesian_thresholds: avg_energy must be positive");
    require_arg(noise_var > 0.0 && std::isfinite(noise_var),
                "aed_bayesian_thresholds: noise variance must be positive");
    require_arg(antennas >= 1, "aed_bayesian_thresholds: antennas must be >= 1");
    // Under symbol p the averaged statistic is Gamma(M, a_p/M) with
    // a_p = avg_energy*e_p + noise_var; equating weighted densities gives a
    // closed-form crossing.
    double rho = avg_energy / noise_var;
    Eigen::ArrayXd d(c.size() - 1);
    for (int p = 0; p + 1 < c.size(); ++p) {
        double ap = rho * c.energy(p) + 1.0;
        double an = rho * c.energy(p + 1) + 1.0;
        double lr = std::log(an / ap) +
                    (std::log(c.prior(p)) - std::log(c.prior(p + 1))) / antennas;
        d[p] = noise_var * lr * ap * an / (rho * (c.energy(p + 1) - c.energy(p)));
    }
    return ThresholdSet(d, ThresholdBasis::AedBayesian);
}

ThresholdSet high_snr_thresholds(double energy_basis, double noise_var, const Constellation& c) {
    require_arg(energy_basis > 0.0 && std::isfinite(energy_basis),
                "high_snr_thresholds: energy basis must be positive");
    require_arg(noise_var > 0.0 && std::isfinite(noise_var),
                "high_snr_thresholds: noise variance must be positive");
    double rho = energy_basis / noise_var;
    Eigen::ArrayXd d(c.size() - 1);
    for (int p = 0; p + 1 < c.size(); ++p) {
        if (c.energy(p) == 0.0)
            d[p] = noise_var * std::sqrt(c.energy(p + 1) * rho / 2.0);
        else
            d[p] = energy_basis * std::sqrt(c.energy(p) * c.energy(p + 1));
    }
    return ThresholdSet(d, ThresholdBasis::HighSnr);
}

ThresholdSet ied_exact_map_thresholds(double inst_energy, double noise_var,
                                      const Constellation& c, int antennas) {
    require_arg(inst_energy >= 0.0 && std::isfinite(inst_energy),
                "ied_exact_map_thresholds: channel energy must be non-negative");
    require_arg(noise_var > 0.0 && std::isfinite(noise_var),
                "ied_exact_map_thresholds: noise variance must be positive");
    require_arg(antennas >= 1, "ied_exact_map_thresholds: antennas must be >= 1");
    const double dof = 2.0 * antennas;
    const double scale = 2.0 * antennas / noise_var;  // z -> chi-square argument

    const double huge = std::numeric_limits<double>::max();

    // Posterior crossing between symbols a < b. The log posterior ratio
    // g(z) = log f_a - log f_b + log(pi_a/pi_b) is monotone decreasing in z
    // for noncentral chi-squares sharing their dof, with the exact limit
    // (lam_b - lam_a)/2 + log(pi_a/pi_b) at z -> 0+ and -inf at z -> +inf
    // when lam_b > lam_a. Returns the unique root, `huge` when a dominates
    // everywhere (flat ratio, ties go to the lower symbol), or nullopt when
    // b dominates everywhere.
    auto crossing = [&](int a, int b) -> std::optional<double> {
        const double lama = scale * inst_energy * c.energy(a);
        const double lamb = scale * inst_energy * c.energy(b);
        const double shift = std::log(c.prior(a)) - std::log(c.prior(b));
        const double at_zero = 0.5 * (lamb - lama) + shift;
        if (at_zero <= 0.0) return std::nullopt;
        if (lamb == lama) return huge;
        auto g = [&](double z) {
            double x = scale * z;
            return noncentral_chi2_log_pdf(x, dof, lama) -
                   noncentral_chi2_log_pdf(x, dof, lamb) + shift;
        };
        double lo = inst_energy * c.energy(a) + noise_var;
        double hi = inst_energy * c.energy(b) + noise_var;
        int guard = 0;
        while (g(lo) <= 0.0 && guard++ < 200) lo *= 0.5;
        if (guard >= 200) throw DegenerateDecisionError("no boundary: likelihood ratio is one-signed");
        guard = 0;
        while (g(hi) >= 0.0 && guard++ < 200) hi *= 1.25;
        if (guard >= 200) throw DegenerateDecisionError("no boundary: likelihood ratio is one-signed");
        for (int i = 0; i < 90 && hi - lo > 1e-15 * hi; ++i) {
            double mid = 0.5 * (lo + hi);
            (g(mid) >= 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    // Adjacent crossings need not be ordered: a symbol whose posterior never
    // dominates (squeezed by a neighbor with a much larger prior, or by
    // near-degenerate noncentralities) has an empty decision region. Merge
    // such symbols away stack-wise, re-crossing against the surviving
    // neighbor, so the returned boundaries are non-decreasing and a vanished
    // symbol keeps a zero-width interval.
    std::vector<int> active = {0};
    std::vector<double> bound;  // bound[k] separates active[k] and active[k+1]
    for (int q = 1; q < c.size(); ++q) {
        std::optional<double> b;
        while (!active.empty()) {
            b = crossing(active.back(), q);
            if (b && (bound.empty() || *b > bound.back())) break;
            active.pop_back();  // the top symbol's region is empty
            if (!bound.empty()) bound.pop_back();
        }
        if (active.empty()) {
            active.push_back(q);  // q owns everything seen so far
            continue;
        }
        active.push_back(q);
        bound.push_back(*b);
    }

    Eigen::ArrayXd d(c.size() - 1);
    int slot = 0;
    for (; slot < active.front(); ++slot) d[slot] = 0.0;  // vanished left symbols
    for (std::size_t k = 0; k + 1 < active.size(); ++k)
        for (; slot < active[k + 1]; ++slot) d[slot] = bound[k];
    for (; slot < c.size() - 1; ++slot) d[slot] = huge;  // vanished right symbols
    return ThresholdSet(d, ThresholdBasis::IedExactMap);
}

IedThresholdInterpolant::IedThresholdInterpolant(const Constellation& c, double noise_var,
                                                 int antennas, double energy_lo, double energy_hi,
                                                 int nodes)
    : constellation_(c), noise_var_(noise_var), antennas_(antennas),
      lo_(energy_lo), hi_(energy_hi) {
    require_arg(nodes >= 8, "threshold interpolant needs at least 8 nodes");
    require_arg(energy_lo > 0.0 && energy_hi > energy_lo, "threshold interpolant range is empty");
    step_ = (hi_ - lo_) / (nodes - 1);
    const int nb = c.size() - 1;
    values_.assign(nb, Eigen::ArrayXd(nodes));
    second_.assign(nb, Eigen::ArrayXd::Zero(nodes));
    for (int i = 0; i < nodes; ++i) {
        ThresholdSet t = ied_exact_map_thresholds(lo_ + i * step_, noise_var_, c, antennas_);
        for (int p = 0; p < nb; ++p) values_[p][i] = t.delta(p);
    }
    // Natural cubic spline: tridiagonal solve for second derivatives.
    for (int p = 0; p < nb; ++p) {
        const Eigen::ArrayXd& y = values_[p];
        Eigen::ArrayXd& m = second_[p];
        int n = nodes;
        Eigen::ArrayXd diag(n), rhs(n), upper(n);
        diag[0] = diag[n - 1] = 1.0;
        rhs[0] = rhs[n - 1] = 0.0;
        upper[0] = 0.0;
        for (int i = 1; i < n - 1; ++i) {
            diag[i] = 2.0 * step_ / 3.0;
            upper[i] = step_ / 6.0;
            rhs[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / step_;
        }
        // Thomas algorithm (lower diagonal equals `upper` by symmetry).
        for (int i = 1; i < n - 1; ++i) {
            double w = (step_ / 6.0) / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m[n - 1] = 0.0;
        for (int i = n - 2; i >= 1; --i) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        m[0] = 0.0;
    }
}

ThresholdSet IedThresholdInterpolant::at(double inst_energy) const {
    if (inst_energy < lo_ || inst_energy > hi_)
        return ied_exact_map_thresholds(inst_energy, noise_var_, constellation_, antennas_);
    int n = static_cast<int>(values_[0].size());
    int i = std::min(static_cast<int>((inst_energy - lo_) / step_), n - 2);
    double x0 = lo_ + i * step_;
    double t1 = inst_energy - x0;        // distance to the left node
    double t0 = step_ - t1;              // distance to the right node
    Eigen::ArrayXd d(values_.size());
    for (size_t p = 0; p < values_.size(); ++p) {
        double y0 = values_[p][i], y1 = values_[p][i + 1];
        double m0 = second_[p][i], m1 = second_[p][i + 1];
        d[static_cast<Eigen::Index>(p)] =
            (t0 * t0 * t0 * m0 + t1 * t1 * t1 * m1) / (6.0 * step_) +
            (y0 / step_ - m0 * step_ / 6.0) * t0 + (y1 / step_ - m1 * step_ / 6.0) * t1;
        // The splines run per boundary, so where two exact boundaries nearly
        // touch the interpolants can overshoot past each other; clamp to keep
        // the interval structure.
        if (p > 0) d[static_cast<Eigen::Index>(p)] =
                       std::max(d[static_cast<Eigen::Index>(p)], d[static_cast<Eigen::Index>(p) - 1]);
    }
    return ThresholdSet(d, ThresholdBasis::IedExactMap);
}

ThresholdSet coherent_amplitude_thresholds(const Constellation& c) {
    Eigen::ArrayXd d(c.size() - 1);
    for (int p = 0; p + 1 < c.size(); ++p) d[p] = 0.5 * (c.amplitude(p) + c.amplitude(p + 1));
    return ThresholdSet(d, ThresholdBasis::CoherentAmplitude);
}

int decide(double statistic, const ThresholdSet& thresholds) {
    const Eigen::ArrayXd& d = thresholds.deltas();
    const double* begin = d.data();
    const double* end = begin + d.size();
    return static_cast<int>(std::upper_bound(begin, end, statistic) - begin);
}

int coherent_detect(const Eigen::VectorXcd& y, const Eigen::VectorXcd& h, const Constellation& c) {
    double hn = h.squaredNorm();
    if (hn == 0.0) throw DegenerateDecisionError("matched filter undefined for a zero channel");
    double w = (h.dot(y) / hn).real();
    return decide(w, coherent_amplitude_thresholds(c));
}

}  // namespace ed
