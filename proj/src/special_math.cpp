#include "ed/special_math.hpp"

#include <cmath>
#include <stdexcept>

namespace ed {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

struct LogTails {
    double log_p;  // log P(a, x), regularized lower
    double log_q;  // log Q(a, x), regularized upper
};

// Both regularized gamma tails of shape a at x, computed in log form.
// Series below the a+1 diagonal (where P <= ~0.92, so the complement via
// log1p is safe), Lentz continued fraction above it (where Q <= ~0.6).
LogTails gamma_log_tails(double a, double x) {
    if (x == 0.0) return {kNegInf, 0.0};
    if (x < a + 1.0) {
        double sum = 1.0, term = 1.0;
        for (int n = 1; n < 1000000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        double log_p = a * std::log(x) - x - std::lgamma(a + 1.0) + std::log(sum);
        if (log_p > 0.0) log_p = 0.0;
        double p = std::exp(log_p);
        double log_q = p < 1.0 ? std::log1p(-p) : kNegInf;
        return {log_p, log_q};
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    double log_q = a * std::log(x) - x - std::lgamma(a) + std::log(h);
    if (log_q > 0.0) log_q = 0.0;
    double q = std::exp(log_q);
    double log_p = q < 1.0 ? std::log1p(-q) : kNegInf;
    return {log_p, log_q};
}

// log of sum_k pois(k; m) * T(s + k, y) where T is the regularized gamma
// upper (upper=true) or lower tail. Uses the additive identities
//   Q(a+1, y) = Q(a, y) + t(a),   P(a-1, y) = P(a, y) + t(a-1),
// t(a) = y^a e^{-y} / Gamma(a+1), so the gamma factor is swept across the
// Poisson window by log-domain additions only: no cancellation, anchored
// on one direct evaluation at the cheap end of the window.
double log_poisson_gamma_mix(double s, double m, double y, bool upper) {
    if (m == 0.0) {
        LogTails t = gamma_log_tails(s, y);
        return upper ? t.log_q : t.log_p;
    }
    // Dominant mixture index: Poisson mode for the bulk, and for far tails
    // the stationary point k*(s + k*) = m*y of the term profile.
    double kstar = 0.5 * (-s + std::sqrt(s * s + 4.0 * m * y));
    double lo_center = std::min(m, kstar);
    double hi_center = std::max(m, kstar);
    double spread = std::sqrt(std::max(m, kstar) + 1.0);
    long w = static_cast<long>(std::ceil(10.0 + 12.0 * spread));
    long kmin = static_cast<long>(std::floor(lo_center)) - w;
    if (kmin < 0) kmin = 0;
    long kmax = static_cast<long>(std::ceil(hi_center)) + w;

    double acc = kNegInf;
    double lp = kmin * std::log(m) - m - std::lgamma(kmin + 1.0);  // log pois(kmin; m)
    double log_y = std::log(y);

    if (upper) {
        double a0 = s + kmin;
        double log_tail = gamma_log_tails(a0, y).log_q;
        double lt = a0 * log_y - y - std::lgamma(a0 + 1.0);  // log t(s + kmin)
        for (long k = kmin; k <= kmax; ++k) {
            double term = lp + log_tail;
            if (term > acc - 42.0) acc = log_add(acc, term);
            if (lt > log_tail - 42.0) log_tail = log_add(log_tail, lt);
            lp += std::log(m) - std::log(k + 1.0);
            lt += log_y - std::log(s + k + 1.0);
        }
    } else {
        double a1 = s + kmax;
        double log_tail = gamma_log_tails(a1, y).log_p;
        lp = kmax * std::log(m) - m - std::lgamma(kmax + 1.0);
        double lt = (a1 - 1.0) * log_y - y - std::lgamma(a1);  // log t(s + kmax - 1)
        for (long k = kmax; k >= kmin; --k) {
            double term = lp + log_tail;
            if (term > acc - 42.0) acc = log_add(acc, term);
            if (lt > log_tail - 42.0) log_tail = log_add(log_tail, lt);
            lp += std::log(static_cast<double>(k)) - std::log(m);
            lt += std::log(s + k - 1.0) - log_y;
        }
    }
    if (acc > 0.0) acc = 0.0;
    return acc;
}

}  // namespace

Probability normal_tail_q(double y) {
    require(!std::isnan(y), "normal_tail_q: y must not be NaN");
    if (y < 0.0) return prob_complement(normal_tail_q(-y));
    if (y <= 25.0) {
        // erfc keeps full relative accuracy down to Q(25) ~ 3e-138.
        return Probability::from_linear(0.5 * std::erfc(y * 0.70710678118654752440));
    }
    // Mills ratio continued fraction R(y) = 1/(y + 1/(y + 2/(y + ...))),
    // Q = phi(y) R(y). At y > 25 forty terms are far below 1e-16 relative.
    double t = y;
    for (int k = 40; k >= 1; --k) t = y + k / t;
    double log_q = -0.5 * y * y - 0.5 * kLogTwoPi - std::log(t);
    return Probability::from_log(log_q);
}

Probability regularized_gamma_lower(double shape, double x) {
    require(shape > 0.0 && std::isfinite(shape), "regularized_gamma_lower: shape must be positive");
    require(x >= 0.0 && std::isfinite(x), "regularized_gamma_lower: x must be non-negative");
    return Probability::from_log(gamma_log_tails(shape, x).log_p);
}

Probability regularized_gamma_upper(double shape, double x) {
    require(shape > 0.0 && std::isfinite(shape), "regularized_gamma_upper: shape must be positive");
    require(x >= 0.0 && std::isfinite(x), "regularized_gamma_upper: x must be non-negative");
    return Probability::from_log(gamma_log_tails(shape, x).log_q);
}

Probability noncentral_chi2_upper(double dof, double lambda, double x) {
    require(dof > 0.0 && std::isfinite(dof), "noncentral_chi2_upper: dof must be positive");
    require(lambda >= 0.0 && std::isfinite(lambda), "noncentral_chi2_upper: lambda must be non-negative");
    require(x >= 0.0 && std::isfinite(x), "noncentral_chi2_upper: x must be non-negative");
    if (x == 0.0) return Probability::one();
    return Probability::from_log(log_poisson_gamma_mix(0.5 * dof, 0.5 * lambda, 0.5 * x, true));
}

Probability noncentral_chi2_lower(double dof, double lambda, double x) {
    require(dof > 0.0 && std::isfinite(dof), "noncentral_chi2_lower: dof must be positive");
    require(lambda >= 0.0 && std::isfinite(lambda), "noncentral_chi2_lower: lambda must be non-negative");
    require(x >= 0.0 && std::isfinite(x), "noncentral_chi2_lower: x must be non-negative");
    if (x == 0.0) return Probability::zero();
    return Probability::from_log(log_poisson_gamma_mix(0.5 * dof, 0.5 * lambda, 0.5 * x, false));
}

double noncentral_chi2_log_pdf(double x, double dof, double lambda) {
    require(dof > 0.0 && std::isfinite(dof), "noncentral_chi2_log_pdf: dof must be positive");
    require(lambda >= 0.0 && std::isfinite(lambda), "noncentral_chi2_log_pdf: lambda must be non-negative");
    require(x >= 0.0 && std::isfinite(x), "noncentral_chi2_log_pdf: x must be non-negative");
    double s = 0.5 * dof;
    double m = 0.5 * lambda;
    double y = 0.5 * x;
    if (x == 0.0) {
        if (dof < 2.0) return std::numeric_limits<double>::infinity();
        if (dof == 2.0) return std::log(0.5) - m;
        return kNegInf;
    }
    double log_y = std::log(y);
    if (m == 0.0) return (s - 1.0) * log_y - y - std::lgamma(s) - std::log(2.0);
    // Mixture of gamma densities: term profile peaks at k*(s + k*) = m*y.
    double kstar = 0.5 * (-s + std::sqrt(s * s + 4.0 * m * y));
    double sigma = std::sqrt(1.0 / (1.0 / (kstar + 1.0) + 1.0 / (s + kstar + 1.0)));
    long w = static_cast<long>(std::ceil(10.0 + 12.0 * sigma));
    long kmin = static_cast<long>(std::floor(kstar)) - w;
    if (kmin < 0) kmin = 0;
    long kmax = static_cast<long>(std::ceil(kstar)) + w;

    double lp = kmin * std::log(m) - m - std::lgamma(kmin + 1.0);
    double lg = (s + kmin - 1.0) * log_y - y - std::lgamma(s + kmin) - std::log(2.0);
    double acc = kNegInf;
    for (long k = kmin; k <= kmax; ++k) {
        double term = lp + lg;
        if (term > acc - 42.0) acc = log_add(acc, term);
        lp += std::log(m) - std::log(k + 1.0);
        lg += log_y - std::log(s + k);
    }
    return acc;
}

double noncentral_chi2_pdf(double x, double dof, double lambda) {
    return std::exp(noncentral_chi2_log_pdf(x, dof, lambda));
}

Probability marcum_q(int order, double a, double b) {
    require(order >= 1, "marcum_q: order must be >= 1");
    require(a >= 0.0 && std::isfinite(a), "marcum_q: a must be non-negative");
    require(b >= 0.0 && std::isfinite(b), "marcum_q: b must be non-negative");
    return noncentral_chi2_upper(2.0 * order, a * a, b * b);
}

}  // namespace ed
