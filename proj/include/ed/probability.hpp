#pragma once

#include <cmath>
#include <limits>

namespace ed {

// Probability value carried in both linear and natural-log form. Tail
// probabilities in this library routinely sit far below DBL_MIN (slope
// analysis at large antenna counts needs log P directly), so the log
// member is the authoritative one for small values; the linear member
// saturates at 0.
struct Probability {
    double value = 0.0;
    double log_value = -std::numeric_limits<double>::infinity();

    static Probability zero() { return {}; }

    static Probability one() { return {1.0, 0.0}; }

    static Probability from_linear(double v) {
        Probability p;
        p.value = v;
        p.log_value = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
        return p;
    }

    static Probability from_log(double lv) {
        Probability p;
        p.log_value = lv;
        p.value = std::exp(lv);
        if (p.value > 1.0) p.value = 1.0;
        return p;
    }
};

// log(e^a + e^b) without overflow; tolerates -inf on either side.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (std::isinf(a) && a < 0.0) return a;  // both -inf
    return a + std::log1p(std::exp(b - a));
}

inline Probability prob_add(const Probability& a, const Probability& b) {
    Probability s;
    s.log_value = log_add(a.log_value, b.log_value);
    s.value = a.value + b.value;
    if (s.value > 1.0) s.value = 1.0;
    // When the linear sum underflows, rebuild it from the log form.
    if (s.value == 0.0 && std::isfinite(s.log_value)) s.value = std::exp(s.log_value);
    return s;
}

// p scaled by a non-negative weight w <= 1 (prior mass).
inline Probability prob_scale(const Probability& p, double w) {
    if (w <= 0.0) return Probability::zero();
    Probability s;
    s.value = p.value * w;
    s.log_value = p.log_value + std::log(w);
    if (s.value == 0.0 && std::isfinite(s.log_value)) s.value = std::exp(s.log_value);
    return s;
}

inline Probability prob_complement(const Probability& p) {
    Probability c;
    c.value = 1.0 - p.value;
    if (c.value < 0.0) c.value = 0.0;
    c.log_value = p.value < 1.0 ? std::log1p(-p.value) : -std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace ed
