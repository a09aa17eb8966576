#include "ed/ser_analysis.hpp"

#include "ed/special_math.hpp"

#include <cmath>
#include <stdexcept>

namespace ed {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

void check_shapes(const Constellation& c, int antennas, const ThresholdSet& t) {
    require(antennas >= 1, "antenna count must be at least 1");
    require(t.boundaries() == c.size() - 1, "threshold count must be P-1");
}

SerReport assemble(std::vector<Probability> per_symbol, const Constellation& c,
                   SerMethod method) {
    SerReport r;
    r.per_symbol = std::move(per_symbol);
    r.method = method;
    r.average = Probability::zero();
    for (int p = 0; p < c.size(); ++p)
        r.average = prob_add(r.average, prob_scale(r.per_symbol[p], c.prior(p)));
    return r;
}

// 12-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
constexpr double kGlNode[6] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                               0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr double kGlWeight[6] = {0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                                 0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

}  // namespace

PostSnr post_processing_snrs(const GaussianMoments& moments, const ThresholdSet& thresholds) {
    const int pairs = thresholds.boundaries();
    require(moments.mean.size() == pairs + 1, "moment count must be one more than boundary count");
    PostSnr snr;
    snr.gamma_u.resize(pairs);
    snr.gamma_l.resize(pairs);
    for (int p = 0; p < pairs; ++p) {
        double du = (thresholds.delta(p) - moments.mean[p]) / std::sqrt(moments.variance[p]);
        double dl = (thresholds.delta(p) - moments.mean[p + 1]) / std::sqrt(moments.variance[p + 1]);
        snr.gamma_u[p] = du * du;
        snr.gamma_l[p] = dl * dl;
    }
    return snr;
}

SerReport ied_exact_ser(double channel_energy, double noise_var, const Constellation& c,
                        int antennas, const ThresholdSet& thresholds) {
    check_shapes(c, antennas, thresholds);
    require(channel_energy >= 0.0, "channel energy must be non-negative");
    require(noise_var > 0.0, "noise variance must be positive");

    // 2Mz/noise_var is noncentral chi-square: 2M degrees of freedom,
    // noncentrality 2M * channel_energy * e_p / noise_var.
    const double scale = 2.0 * antennas / noise_var;
    const double dof = 2.0 * antennas;
    std::vector<Probability> per(c.size());
    for (int p = 0; p < c.size(); ++p) {
        double lambda = scale * channel_energy * c.energy(p);
        Probability err = Probability::zero();
        if (p + 1 < c.size())
            err = prob_add(err, noncentral_chi2_upper(dof, lambda, scale * thresholds.delta(p)));
        if (p > 0)
            err = prob_add(err, noncentral_chi2_lower(dof, lambda, scale * thresholds.delta(p - 1)));
        per[p] = err;
    }
    return assemble(std::move(per), c, SerMethod::IedExactMarcumQ);
}

GaussianSerAnalysis ied_gaussian_ser(double channel_energy, double noise_var,
                                     const Constellation& c, int antennas,
                                     const ThresholdSet& thresholds) {
    check_shapes(c, antennas, thresholds);
    GaussianMoments m = energy_statistic_moments(channel_energy, noise_var, c, antennas);

    std::vector<Probability> per(c.size());
    for (int p = 0; p < c.size(); ++p) {
        double sd = std::sqrt(m.variance[p]);
        Probability err = Probability::zero();
        if (p + 1 < c.size())
            err = prob_add(err, normal_tail_q((thresholds.delta(p) - m.mean[p]) / sd));
        if (p > 0)
            err = prob_add(err, normal_tail_q((m.mean[p] - thresholds.delta(p - 1)) / sd));
        per[p] = err;
    }

    GaussianSerAnalysis out{assemble(std::move(per), c, SerMethod::IedGaussian),
                            post_processing_snrs(m, thresholds)};
    return out;
}

SerReport aed_exact_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                        int antennas, const ThresholdSet& thresholds) {
    check_shapes(c, antennas, thresholds);
    require(avg_channel_energy >= 0.0, "average channel energy must be non-negative");
    require(noise_var > 0.0, "noise variance must be positive");

    std::vector<Probability> per(c.size());
    for (int p = 0; p < c.size(); ++p) {
        // Statistic under symbol p is Gamma with shape M and this mean.
        double mean = avg_channel_energy * c.energy(p) + noise_var;
        Probability err = Probability::zero();
        if (p + 1 < c.size())
            err = prob_add(err, regularized_gamma_upper(antennas, antennas * thresholds.delta(p) / mean));
        if (p > 0)
            err = prob_add(err,
                           regularized_gamma_lower(antennas, antennas * thresholds.delta(p - 1) / mean));
        per[p] = err;
    }
    return assemble(std::move(per), c, SerMethod::AedExactChi2);
}

SerReport aed_chernoff_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                           int antennas, const ThresholdSet& thresholds) {
    check_shapes(c, antennas, thresholds);
    require(avg_channel_energy >= 0.0, "average channel energy must be non-negative");
    require(noise_var > 0.0, "noise variance must be positive");

    auto tail = [&](double delta) {
        if (delta <= 0.0) return Probability::zero();
        return Probability::from_log(antennas * (std::log(delta) + 1.0 - delta));
    };

    bool valid = true;
    std::vector<Probability> per(c.size());
    for (int p = 0; p < c.size(); ++p) {
        double mean = avg_channel_energy * c.energy(p) + noise_var;
        Probability err = Probability::zero();
        if (p + 1 < c.size()) {
            double delta = thresholds.delta(p) / mean;
            if (delta <= 1.0) valid = false;  // upper tail needs the threshold above the mean
            err = prob_add(err, tail(delta));
        }
        if (p > 0) {
            double delta = thresholds.delta(p - 1) / mean;
            if (delta >= 1.0) valid = false;  // lower tail needs the threshold below the mean
            err = prob_add(err, tail(delta));
        }
        per[p] = err;
    }
    SerReport r = assemble(std::move(per), c, SerMethod::AedChernoff);
    r.approximation_valid = valid;
    return r;
}

Probability pam_floor(const Constellation& c, int antennas) {
    require(antennas >= 1, "antenna count must be at least 1");
    const int levels = c.size();
    if (levels == 2) return Probability::zero();

    // High-SNR limit of the Chernoff tail sum: for each interior boundary p
    // the up-crossing parameter tends to eta_p = sqrt(e_{p+1}/e_p) and the
    // down-crossing to 1/eta_p; the boundary at the zero level vanishes.
    double log_sum = -std::numeric_limits<double>::infinity();
    for (int p = 1; p + 1 < levels; ++p) {
        double eta = std::sqrt(c.energy(p + 1) / c.energy(p));
        double up = antennas * (std::log(eta) + 1.0 - eta);
        double down = antennas * (-std::log(eta) + 1.0 - 1.0 / eta);
        log_sum = log_add(log_sum, log_add(up, down) + std::log(c.prior(p)));
    }
    return Probability::from_log(log_sum);
}

namespace {

// Average of Q(sqrt(2g)) for g Gamma-distributed with shape M and
// per-branch mean branch_snr: the classic maximum-ratio-combining pair
// error, evaluated in log domain so deep-diversity values survive.
double log_mrc_pair_error(double branch_snr, int antennas) {
    if (branch_snr <= 0.0) return std::log(0.5);
    double u = 1.0 / (1.0 + branch_snr);      // 1 - mu^2
    double mu = std::sqrt(branch_snr * u);    // sqrt(g/(1+g))
    double log_lo = std::log(u) - std::log1p(mu) - std::log(2.0);  // log((1-mu)/2)
    double log_hi = std::log1p(-0.5 * u / (1.0 + mu));             // log((1+mu)/2)
    double lg_m = std::lgamma(antennas);
    double sum = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < antennas; ++k) {
        double term = std::lgamma(antennas + k) - std::lgamma(k + 1.0) - lg_m + k * log_hi;
        sum = log_add(sum, term);
    }
    return antennas * log_lo + sum;
}

}  // namespace

SerReport coherent_mrc_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                           int antennas) {
    require(antennas >= 1, "antenna count must be at least 1");
    require(avg_channel_energy > 0.0, "average channel energy must be positive");
    require(noise_var > 0.0, "noise variance must be positive");

    Eigen::ArrayXd kappas = pair_kappas(c);
    const int pairs = c.size() - 1;
    std::vector<Probability> cross(pairs);
    for (int p = 0; p < pairs; ++p) {
        double branch_snr = avg_channel_energy * kappas[p] / (2.0 * noise_var);
        cross[p] = Probability::from_log(log_mrc_pair_error(branch_snr, antennas));
    }

    std::vector<Probability> per(c.size());
    for (int p = 0; p < c.size(); ++p) {
        Probability err = Probability::zero();
        if (p + 1 < c.size()) err = prob_add(err, cross[p]);
        if (p > 0) err = prob_add(err, cross[p - 1]);
        per[p] = err;
    }
    return assemble(std::move(per), c, SerMethod::CoherentMatchedFilter);
}

Eigen::ArrayXd average_over_channel_energy(int antennas, double avg_channel_energy,
                                           double scale_hint,
                                           const std::function<Eigen::ArrayXd(double)>& conditional) {
    require(antennas >= 1, "antenna count must be at least 1");
    require(avg_channel_energy > 0.0, "average channel energy must be positive");

    const double rate = antennas / avg_channel_energy;
    const double log_norm = antennas * std::log(rate) - std::lgamma(antennas);
    auto log_density = [&](double t) { return log_norm + (antennas - 1) * std::log(t) - rate * t; };

    // Panel edges: geometric stack through the small-energy decades (where
    // deep fades concentrate the conditional's structure), then linear
    // panels sized to the hardened density's width through the bulk.
    const double t_hi =
        avg_channel_energy * (40.0 + antennas + 10.0 * std::sqrt(double(antennas))) / antennas;
    double fine = avg_channel_energy;
    if (scale_hint > 0.0 && scale_hint < fine) fine = scale_hint;
    const double t_lo = 1e-8 * fine;
    const double bulk = std::max(0.04 * avg_channel_energy,
                                 avg_channel_energy * (1.0 - 14.0 / std::sqrt(double(antennas))));

    std::vector<double> edges;
    // Head panel [0, t_lo] carries visible mass only for a single antenna,
    // where the density does not vanish at the origin.
    edges.push_back(0.0);
    edges.push_back(t_lo);
    for (double e = t_lo; e < bulk;) {
        e *= 1.32;
        edges.push_back(std::min(e, bulk));
    }
    const double width = avg_channel_energy * std::min(0.35, 2.0 / std::sqrt(double(antennas)));
    for (double e = edges.back(); e < t_hi;) {
        e += width;
        edges.push_back(std::min(e, t_hi));
    }

    Eigen::ArrayXd acc;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double mid = 0.5 * (edges[i] + edges[i + 1]);
        double half = 0.5 * (edges[i + 1] - edges[i]);
        if (half <= 0.0) continue;
        for (int j = 0; j < 6; ++j) {
            for (double sign : {-1.0, 1.0}) {
                double t = mid + sign * half * kGlNode[j];
                double w = half * kGlWeight[j] * std::exp(log_density(t));
                if (w == 0.0) continue;
                Eigen::ArrayXd v = conditional(t);
                if (acc.size() == 0) acc = Eigen::ArrayXd::Zero(v.size());
                acc += w * v;
            }
        }
    }
    if (acc.size() == 0) throw std::runtime_error("channel-energy average collected no mass");
    return acc;
}

IedThresholdInterpolant make_ied_map_interpolant(const Constellation& c, double noise_var,
                                                 int antennas, double avg_channel_energy) {
    require(avg_channel_energy > 0.0, "average channel energy must be positive");
    const double hi =
        avg_channel_energy * (40.0 + antennas + 10.0 * std::sqrt(double(antennas))) / antennas;
    return IedThresholdInterpolant(c, noise_var, antennas, 0.02 * avg_channel_energy, hi, 160);
}

SerReport ied_average_ser(double avg_channel_energy, double noise_var, const Constellation& c,
                          int antennas, ThresholdBasis rule) {
    require(rule == ThresholdBasis::IedGaussian || rule == ThresholdBasis::IedExactMap,
            "rule must be an instantaneous-energy threshold basis");
    require(noise_var > 0.0, "noise variance must be positive");

    std::optional<IedThresholdInterpolant> interp;
    if (rule == ThresholdBasis::IedExactMap)
        interp.emplace(make_ied_map_interpolant(c, noise_var, antennas, avg_channel_energy));

    auto conditional = [&](double energy) {
        ThresholdSet t = rule == ThresholdBasis::IedGaussian
                             ? ied_gaussian_thresholds(energy, noise_var, c, antennas)
                             : interp->at(energy);
        SerReport r = ied_exact_ser(energy, noise_var, c, antennas, t);
        Eigen::ArrayXd v(c.size());
        for (int p = 0; p < c.size(); ++p) v[p] = r.per_symbol[p].value;
        return v;
    };

    double kappa_min = pair_kappas(c).minCoeff();
    double hint = noise_var / (antennas * kappa_min);
    Eigen::ArrayXd avg = average_over_channel_energy(antennas, avg_channel_energy, hint, conditional);

    std::vector<Probability> per(c.size());
    for (int p = 0; p < c.size(); ++p) per[p] = Probability::from_linear(std::min(avg[p], 1.0));
    return assemble(std::move(per), c, SerMethod::IedExactMarcumQ);
}

EquivalenceReport highsnr_coherent_equivalence_check(const Constellation& c, int antennas,
                                                     double snr) {
    require(antennas >= 1, "antenna count must be at least 1");
    require(snr > 0.0, "snr must be positive");

    const double noise_var = 1.0 / snr;  // unit instantaneous channel energy throughout
    const int pairs = c.size() - 1;

    EquivalenceReport rep;
    rep.ied_gamma_limit = antennas * snr * pair_kappas(c);

    // Coherent side built from the matched filter's own geometry instead of
    // reusing the kappa shortcut: real-part statistic sits at the amplitude
    // with variance noise_var / (2 M), boundaries at amplitude midpoints.
    ThresholdSet mids = coherent_amplitude_thresholds(c);
    const double coh_var = noise_var / (2.0 * antennas);
    rep.coherent_gamma.resize(pairs);
    for (int p = 0; p < pairs; ++p) {
        double d = mids.delta(p) - c.amplitude(p);
        rep.coherent_gamma[p] = d * d / coh_var;
    }

    // What the quadratic MAP rule actually achieves at this snr.
    ThresholdSet quad = ied_gaussian_thresholds(1.0, noise_var, c, antennas);
    GaussianMoments m = energy_statistic_moments(1.0, noise_var, c, antennas);
    PostSnr got = post_processing_snrs(m, quad);
    rep.ied_gamma_u = got.gamma_u;
    rep.ied_gamma_l = got.gamma_l;

    for (int p = 0; p < pairs; ++p) {
        double ref = rep.coherent_gamma[p];
        rep.max_relative_gap =
            std::max(rep.max_relative_gap, std::fabs(rep.ied_gamma_limit[p] - ref) / ref);
        double fin =
            std::max(std::fabs(got.gamma_u[p] - ref), std::fabs(got.gamma_l[p] - ref)) / ref;
        rep.finite_snr_gap = std::max(rep.finite_snr_gap, fin);
    }
    rep.high_snr_regime = rep.finite_snr_gap < 0.10;
    return rep;
}

SlopeFit slope_fit(const std::vector<std::pair<double, Probability>>& curve) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, p] : curve)
        if (std::isfinite(p.log_value)) pts.push_back({x, p.log_value / std::log(10.0)});
    if (pts.size() < 3) throw std::invalid_argument("slope fit needs at least 3 positive points");

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct abscissas");

    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points_used = static_cast<int>(pts.size());
    return f;
}

}  // namespace ed
