#include "ed/optimizer.hpp"

#include "ed/detector.hpp"
#include "ed/rng.hpp"
#include "ed/ser_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ed {

namespace {

constexpr double kGap = 1e-9;          // minimum spacing between adjacent energies
constexpr double kObjectiveFloor = -1e12;  // stand-in for log(0) SER
const double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

Eigen::ArrayXd uniform_priors(int levels) {
    Eigen::ArrayXd q(levels);
    q.setConstant(1.0 / levels);
    return q;
}

std::vector<double> to_vec(const Eigen::ArrayXd& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

double evaluate(const OptimizationProblem& pr, const Eigen::ArrayXd& priors,
                const std::vector<double>& energies) {
    try {
        Constellation cand = make_custom(energies, to_vec(priors));
        switch (pr.objective) {
            case DesignObjective::IedInstantaneousSer: {
                ThresholdSet t =
                    ied_gaussian_thresholds(pr.channel_energy, pr.noise_var, cand, pr.antennas);
                double lv =
                    ied_gaussian_ser(pr.channel_energy, pr.noise_var, cand, pr.antennas, t)
                        .report.average.log_value;
                return std::max(lv, kObjectiveFloor);
            }
            case DesignObjective::AedAverageSer: {
                ThresholdSet t =
                    aed_gaussian_thresholds(pr.channel_energy, pr.noise_var, cand, pr.antennas);
                double lv = aed_exact_ser(pr.channel_energy, pr.noise_var, cand, pr.antennas, t)
                                .average.log_value;
                return std::max(lv, kObjectiveFloor);
            }
            case DesignObjective::MinimaxPostSnr: {
                ThresholdSet t =
                    ied_gaussian_thresholds(pr.channel_energy, pr.noise_var, cand, pr.antennas);
                GaussianMoments m =
                    energy_statistic_moments(pr.channel_energy, pr.noise_var, cand, pr.antennas);
                PostSnr s = post_processing_snrs(m, t);
                double worst = 0.0;
                for (int p = 0; p < s.gamma_u.size(); ++p) {
                    // Mismatch is normalized per boundary: both post-SNRs grow
                    // without bound in SNR and M, and an absolute difference
                    // would be minimized by collapsing the constellation
                    // (shrinking every gamma), not by equalizing the pairs.
                    double gu = s.gamma_u[p];
                    double gl = s.gamma_l[p];
                    if (!(gu > 0.0) || !(gl > 0.0)) return kInf;
                    double d = gl - gu;
                    worst = std::max(worst, d * d / (gu * gl));
                }
                return worst;
            }
        }
    } catch (const DegenerateDecisionError&) {
        return kInf;
    } catch (const std::invalid_argument&) {
        return kInf;
    }
    return kInf;
}

struct LineMin {
    double x;
    double f;
};

// Golden-section minimization keeping the best sampled point.
template <typename F>
LineMin golden_min(F&& f, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    constexpr double kInvPhi2 = 0.3819660112501051;
    double a = lo, b = hi;
    double x1 = a + kInvPhi2 * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    LineMin best = f1 <= f2 ? LineMin{x1, f1} : LineMin{x2, f2};
    for (int it = 0; it < 64 && (b - a) > 1e-13 * (1.0 + std::fabs(b)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + kInvPhi2 * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
        const LineMin cand = f1 <= f2 ? LineMin{x1, f1} : LineMin{x2, f2};
        if (cand.f < best.f) best = cand;
    }
    return best;
}

struct RunOutcome {
    std::vector<double> energies;
    double objective = kInf;
    int sweeps = 0;
    bool converged = false;
    std::vector<std::pair<int, double>> trace;
};

RunOutcome descend(const OptimizationProblem& pr, const Eigen::ArrayXd& priors,
                   std::vector<double> e) {
    const int levels = pr.levels;
    auto renorm = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (int p = 0; p < levels; ++p) mean += priors[p] * v[p];
        for (double& x : v) x /= mean;
    };
    renorm(e);

    RunOutcome out;
    double obj = evaluate(pr, priors, e);
    out.trace.push_back({0, obj});
    for (int sweep = 1; sweep <= pr.max_sweeps; ++sweep) {
        for (int p = 0; p < levels; ++p) {
            double lo = p == 0 ? 0.0 : e[p - 1] + kGap;
            double hi;
            if (p + 1 < levels) {
                hi = e[p + 1] - kGap;
            } else {
                double span = levels > 1 ? e[levels - 1] - e[levels - 2] : 1.0;
                hi = e[levels - 1] + 3.0 * span + 1.0;
            }
            if (hi <= lo) continue;
            auto line = [&](double v) {
                std::vector<double> cand = e;
                cand[p] = v;
                return evaluate(pr, priors, cand);
            };
            LineMin m = golden_min(line, lo, hi);
            if (m.f < obj) {
                e[p] = m.x;
                obj = m.f;
            }
        }
        renorm(e);
        out.trace.push_back({sweep, obj});
        out.sweeps = sweep;
        double prev = out.trace[out.trace.size() - 2].second;
        if (prev - obj < pr.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.energies = std::move(e);
    out.objective = obj;
    return out;
}

std::vector<double> start_point(const OptimizationProblem& pr, const Eigen::ArrayXd& priors,
                                int restart) {
    std::vector<double> e;
    if (pr.initial) {
        const Constellation& c = *pr.initial;
        for (int p = 0; p < c.size(); ++p) e.push_back(c.energy(p));
    } else {
        Constellation c = make_conventional_pam(pr.levels, priors);
        for (int p = 0; p < c.size(); ++p) e.push_back(c.energy(p));
    }
    if (restart > 0) {
        PhiloxStream rng(pr.seed, 1, static_cast<std::uint64_t>(restart), 0);
        for (double& x : e) x *= 0.6 + 0.9 * rng.uniform();
        std::sort(e.begin(), e.end());
        for (std::size_t p = 1; p < e.size(); ++p)
            e[p] = std::max(e[p], e[p - 1] + 10.0 * kGap);
    }
    return e;
}

}  // namespace

OptimizationResult optimize(const OptimizationProblem& pr) {
    require(pr.levels >= 2, "need at least two energy levels");
    require(pr.antennas >= 1, "antenna count must be at least 1");
    require(pr.noise_var > 0.0, "noise variance must be positive");
    require(pr.channel_energy > 0.0, "channel energy must be positive");
    require(pr.max_sweeps >= 1, "sweep cap must be at least 1");
    require(pr.tolerance >= 0.0, "tolerance must be non-negative");
    require(pr.restarts >= 1, "need at least one restart");
    Eigen::ArrayXd priors = pr.priors.size() ? pr.priors : uniform_priors(pr.levels);
    require(static_cast<int>(priors.size()) == pr.levels, "prior count must match level count");
    if (pr.initial)
        require(pr.initial->size() == pr.levels, "initial constellation must match level count");

    RunOutcome best;
    for (int r = 0; r < pr.restarts; ++r) {
        RunOutcome run = descend(pr, priors, start_point(pr, priors, r));
        if (run.objective < best.objective) best = std::move(run);
    }
    if (!std::isfinite(best.objective) || best.energies.empty())
        throw std::runtime_error("optimization produced no feasible constellation");

    OptimizationResult res{make_custom(best.energies, to_vec(priors)),
                           best.objective,
                           best.sweeps,
                           best.converged,
                           std::move(best.trace)};
    return res;
}

OptimizationResult optimize_ied(OptimizationProblem problem) {
    problem.objective = DesignObjective::IedInstantaneousSer;
    return optimize(problem);
}

OptimizationResult optimize_minimax_gamma(OptimizationProblem problem) {
    problem.objective = DesignObjective::MinimaxPostSnr;
    return optimize(problem);
}

OptimizationResult optimize_aed(OptimizationProblem problem) {
    problem.objective = DesignObjective::AedAverageSer;
    return optimize(problem);
}

}  // namespace ed
