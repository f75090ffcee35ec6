#include "rrl/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_distribution(std::span<const double> p, const char* what) {
    if (p.empty()) throw ModelError(std::string(what) + ": empty distribution");
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ModelError(std::string(what) + ": negative or non-finite mass");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ModelError(std::string(what) + ": masses do not sum to 1");
}

void check_inputs(std::span<const double> nominal, std::span<const double> values, double sigma) {
    check_distribution(nominal, "nominal");
    if (values.size() != nominal.size()) throw ModelError("value vector and nominal distribution differ in length");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ModelError("radius must be finite and nonnegative");
}

/// Nominal restricted to its positive-mass coordinates.
struct Support {
    std::vector<double> prob;
    std::vector<double> value;
    double min = kInf;
    double max = -kInf;
    double mean = 0.0;
};

Support& gather_support(std::span<const double> nominal, std::span<const double> values) {
    thread_local Support sup;
    sup.prob.clear();
    sup.value.clear();
    sup.min = kInf;
    sup.max = -kInf;
    sup.mean = 0.0;
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        if (nominal[i] <= 0.0) continue;
        sup.prob.push_back(nominal[i]);
        sup.value.push_back(values[i]);
        sup.min = std::min(sup.min, values[i]);
        sup.max = std::max(sup.max, values[i]);
        sup.mean += nominal[i] * values[i];
    }
    return sup;
}

double chi2_objective(const Support& sup, double sigma, double eta) {
    double mean = 0.0;
    for (std::size_t i = 0; i < sup.prob.size(); ++i) mean += sup.prob[i] * std::min(sup.value[i], eta);
    double var = 0.0;
    for (std::size_t i = 0; i < sup.prob.size(); ++i) {
        const double d = std::min(sup.value[i], eta) - mean;
        var += sup.prob[i] * d * d;
    }
    return mean - std::sqrt(sigma * std::max(var, 0.0));
}

double kl_objective(const Support& sup, double sigma, double eta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sup.prob.size(); ++i) acc += sup.prob[i] * std::exp(-(sup.value[i] - sup.min) / eta);
    return -eta * std::log(acc) + sup.min - eta * sigma;
}

}  // namespace

double f_divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind) {
    if (p.size() != q.size()) throw ModelError("f_divergence: length mismatch");
    check_distribution(p, "f_divergence p");
    check_distribution(q, "f_divergence q");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        switch (kind) {
        case DivergenceKind::TV:
            total += std::abs(p[i] - q[i]);
            break;
        case DivergenceKind::Chi2:
            if (q[i] == 0.0) {
                if (p[i] > 0.0) return kInf;
            } else {
                const double d = p[i] - q[i];
                total += d * d / q[i];
            }
            break;
        case DivergenceKind::KL:
            if (p[i] == 0.0) break;
            if (q[i] == 0.0) return kInf;
            total += p[i] * std::log(p[i] / q[i]);
            break;
        }
    }
    return std::max(total, 0.0);
}

double robust_expectation_tv(std::span<const double> nominal, std::span<const double> values, double sigma) {
    check_inputs(nominal, values, sigma);
    const auto& sup = gather_support(nominal, values);
    if (sigma == 0.0) return sup.mean;
    const double global_min = *std::min_element(values.begin(), values.end());
    const double global_max = *std::max_element(values.begin(), values.end());
    auto objective = [&](double eta) {
        double shortfall = 0.0;
        for (std::size_t i = 0; i < sup.prob.size(); ++i) shortfall += sup.prob[i] * std::max(eta - sup.value[i], 0.0);
        return eta - shortfall - 0.5 * sigma * std::max(eta - global_min, 0.0);
    };
    // Piecewise linear in eta with kinks at the support values and at the global minimum.
    double best = objective(0.0);
    best = std::max(best, objective(global_min));
    best = std::max(best, objective(global_max));
    for (double v : sup.value) best = std::max(best, objective(v));
    return best;
}

double chi2_dual_objective(std::span<const double> nominal, std::span<const double> values, double sigma,
                           double eta) {
    check_inputs(nominal, values, sigma);
    return chi2_objective(gather_support(nominal, values), sigma, eta);
}

double kl_dual_objective(std::span<const double> nominal, std::span<const double> values, double sigma,
                         double eta) {
    check_inputs(nominal, values, sigma);
    if (!(eta > 0.0)) throw ModelError("KL dual temperature must be positive");
    return kl_objective(gather_support(nominal, values), sigma, eta);
}

double robust_expectation_chi2(std::span<const double> nominal, std::span<const double> values, double sigma,
                               const DualSolverConfig& cfg) {
    check_inputs(nominal, values, sigma);
    const auto& sup = gather_support(nominal, values);
    if (sigma == 0.0 || sup.max == sup.min) return sup.mean;
    const auto best = maximize_unimodal_1d([&](double eta) { return chi2_objective(sup, sigma, eta); }, sup.min,
                                           sup.max, cfg, sup.value);
    return std::clamp(best.max, sup.min, sup.mean);
}

double robust_expectation_kl(std::span<const double> nominal, std::span<const double> values, double sigma,
                             const DualSolverConfig& cfg) {
    check_inputs(nominal, values, sigma);
    const auto& sup = gather_support(nominal, values);
    if (sigma == 0.0 || sup.max == sup.min) return sup.mean;
    // The dual slope is KL(tilted || nominal) - sigma and that KL is at most range/eta,
    // so the maximizer never exceeds range/sigma.
    const double hi = std::max(cfg.eta_floor, (sup.max - sup.min) / sigma);
    const auto best =
        maximize_unimodal_1d([&](double eta) { return kl_objective(sup, sigma, eta); }, cfg.eta_floor, hi, cfg);
    // eta -> 0+ limit of the objective is the support minimum.
    return std::clamp(std::max(best.max, sup.min), sup.min, sup.mean);
}

double robust_expectation(const DivergenceSpec& spec, std::span<const double> nominal,
                          std::span<const double> values, const DualSolverConfig& cfg) {
    switch (spec.kind) {
    case DivergenceKind::TV: return robust_expectation_tv(nominal, values, spec.radius);
    case DivergenceKind::Chi2: return robust_expectation_chi2(nominal, values, spec.radius, cfg);
    case DivergenceKind::KL: return robust_expectation_kl(nominal, values, spec.radius, cfg);
    }
    throw ModelError("unsupported divergence");
}

namespace {

struct GridSearch {
    std::size_t dims;
    long steps;
    double budget;
    const std::vector<std::vector<double>>& div_terms;  // [coordinate][k]
    const std::vector<double>& vals;
    std::vector<long> counts;
    double best_value = kInf;
    std::vector<long> best_counts;

    void run(std::size_t i, long remaining, double div, double expect) {
        if (i + 1 == dims) {
            const double d = div + div_terms[i][remaining];
            if (d > budget) return;
            const double e = expect + vals[i] * static_cast<double>(remaining) / static_cast<double>(steps);
            if (e < best_value) {
                counts[i] = remaining;
                best_value = e;
                best_counts = counts;
            }
            return;
        }
        for (long k = 0; k <= remaining; ++k) {
            const double d = div + div_terms[i][k];
            if (d > budget) continue;
            counts[i] = k;
            run(i + 1, remaining - k, d, expect + vals[i] * static_cast<double>(k) / static_cast<double>(steps));
        }
    }
};

}  // namespace

WorstCase worst_case_oracle(std::span<const double> nominal, std::span<const double> values,
                            const DivergenceSpec& spec, double resolution) {
    check_inputs(nominal, values, spec.radius);
    if (!(resolution > 0.0) || resolution > 1e-3) throw ModelError("oracle resolution must lie in (0, 1e-3]");

    std::vector<std::size_t> coords;
    for (std::size_t i = 0; i < nominal.size(); ++i)
        if (spec.kind == DivergenceKind::TV || nominal[i] > 0.0) coords.push_back(i);
    if (coords.size() > 4) throw ModelError("oracle supports at most 4 free coordinates");

    const long steps = std::lround(1.0 / resolution);
    const std::size_t dims = coords.size();
    std::vector<std::vector<double>> terms(dims, std::vector<double>(static_cast<std::size_t>(steps) + 1));
    std::vector<double> vals(dims);
    for (std::size_t j = 0; j < dims; ++j) {
        const double q = nominal[coords[j]];
        vals[j] = values[coords[j]];
        for (long k = 0; k <= steps; ++k) {
            const double p = static_cast<double>(k) / static_cast<double>(steps);
            double t = 0.0;
            switch (spec.kind) {
            case DivergenceKind::TV: t = std::abs(p - q); break;
            case DivergenceKind::Chi2: t = q > 0.0 ? (p - q) * (p - q) / q : (p > 0.0 ? kInf : 0.0); break;
            case DivergenceKind::KL: t = (p > 0.0 ? p * std::log(p / q) : 0.0) - p + q; break;
            }
            terms[j][static_cast<std::size_t>(k)] = t;
        }
    }

    // KL terms carry -p+q so that every partial sum is nonnegative; the totals agree.
    // The nominal itself is always feasible even when it does not lie on the grid.
    WorstCase result;
    result.argmin.assign(nominal.begin(), nominal.end());
    result.value = std::inner_product(nominal.begin(), nominal.end(), values.begin(), 0.0);

    // Feasibility slack shrinks with the radius so that a zero radius admits only the nominal.
    const double limit = spec.radius + resolution * std::min(1.0, spec.radius);
    GridSearch search{dims, steps, limit, terms, vals, std::vector<long>(dims, 0), kInf, {}};
    search.run(0, steps, 0.0, 0.0);
    if (search.best_value < result.value) {
        result.value = search.best_value;
        std::fill(result.argmin.begin(), result.argmin.end(), 0.0);
        for (std::size_t j = 0; j < dims; ++j)
            result.argmin[coords[j]] = static_cast<double>(search.best_counts[j]) / static_cast<double>(steps);
    }
    return result;
}

double oracle_value_slack(std::span<const double> values, double resolution) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return 4.0 * resolution * (*hi - *lo);
}

}  // namespace rrl
