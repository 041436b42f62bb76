#pragma once

// Baseline calibrators: a two-parameter sigmoid fitted by maximum likelihood
// (damped Newton on the concave Bernoulli log-likelihood, optionally with the
// classic smoothed targets) and isotonic regression via pair-adjacent
// violators with score ties pre-pooled.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "bincal/core.hpp"
#include "bincal/error.hpp"

namespace bincal {

struct PlattOptions {
    bool smooth_targets = true;
    std::size_t max_iterations = 200;
    double gradient_tolerance = 1e-10;
};

// p(s) = sigmoid(slope * s + offset). Strictly monotone for slope != 0, so it
// preserves the base classifier's ranking exactly.
struct PlattModel {
    double slope = 0.0;
    double offset = 0.0;
    bool smoothed_targets = true;
    bool converged = false;
    double gradient_norm = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;

    double calibrate(double s) const {
        const double z = slope * s + offset;
        return 1.0 / (1.0 + std::exp(-z));
    }
};

namespace detail {

inline double softplus(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

// Mean negative log-likelihood of targets t under sigmoid(a s + b).
inline double platt_loss(const std::vector<double>& s, const std::vector<double>& t,
                         double a, double b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double z = a * s[i] + b;
        sum += t[i] * softplus(-z) + (1.0 - t[i]) * softplus(z);
    }
    return sum / static_cast<double>(s.size());
}

} // namespace detail

inline PlattModel fit_platt(const SortedCalibrationSet& set, PlattOptions opts = {}) {
    const std::size_t n = set.size();
    const std::size_t n_pos = set.ones_in(0, n);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw errors::single_class_data("fit_platt");

    const double t_pos = opts.smooth_targets
                             ? (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0)
                             : 1.0;
    const double t_neg = opts.smooth_targets ? 1.0 / (static_cast<double>(n_neg) + 2.0) : 0.0;

    std::vector<double> s(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = set.score(i);
        t[i] = set.label(i) ? t_pos : t_neg;
    }

    PlattModel model;
    model.smoothed_targets = opts.smooth_targets;
    double a = 0.0, b = 0.0;
    double loss = detail::platt_loss(s, t, a, b);

    const double inv_n = 1.0 / static_cast<double>(n);
    auto gradient_at = [&](double aa, double bb, double& ga, double& gb) {
        ga = 0.0;
        gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = aa * s[i] + bb;
            const double r = 1.0 / (1.0 + std::exp(-z)) - t[i];
            ga += r * s[i];
            gb += r;
        }
        ga *= inv_n;
        gb *= inv_n;
        return std::sqrt(ga * ga + gb * gb);
    };

    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        double ga, gb;
        const double gnorm = gradient_at(a, b, ga, gb);
        model.gradient_norm = gnorm;
        model.iterations = iter;
        if (gnorm <= opts.gradient_tolerance) {
            model.converged = true;
            break;
        }

        double haa = 0.0, hab = 0.0, hbb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = a * s[i] + b;
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double w = p * (1.0 - p);
            haa += w * s[i] * s[i];
            hab += w * s[i];
            hbb += w;
        }
        haa *= inv_n; hab *= inv_n; hbb *= inv_n;

        double det = haa * hbb - hab * hab;
        if (det <= 1e-12 * (haa + hbb + 1e-300)) {
            const double ridge = 1e-8 * (haa + hbb) + 1e-12;
            haa += ridge; hbb += ridge;
            det = haa * hbb - hab * hab;
        }
        const double da = -(hbb * ga - hab * gb) / det;
        const double db = -(haa * gb - hab * ga) / det;

        // Near the optimum the loss is flat to double precision, so a loss
        // line search cannot see the quadratic phase; accept the full Newton
        // step whenever it shrinks the gradient, damp on the loss otherwise.
        double g2a, g2b;
        if (gradient_at(a + da, b + db, g2a, g2b) < gnorm) {
            a += da;
            b += db;
            loss = detail::platt_loss(s, t, a, b);
            continue;
        }
        double step = 0.5;
        bool improved = false;
        for (int halving = 0; halving < 50; ++halving) {
            const double cand = detail::platt_loss(s, t, a + step * da, b + step * db);
            if (cand < loss) {
                a += step * da;
                b += step * db;
                loss = cand;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved)
            break; // stalled at numerical precision
    }

    model.slope = a;
    model.offset = b;
    return model;
}

// Step-function isotonic fit: thresholds[j] is the first pooled score of
// block j, values[j] the block mean. Queries left of the first threshold get
// the first value, right of the last the last value.
struct IsotonicModel {
    std::vector<double> thresholds;
    std::vector<double> values;

    double calibrate(double s) const {
        auto it = std::upper_bound(thresholds.begin(), thresholds.end(), s);
        const std::size_t idx = (it == thresholds.begin())
                                    ? 0
                                    : static_cast<std::size_t>(it - thresholds.begin()) - 1;
        return values[idx];
    }
};

inline IsotonicModel fit_isotonic(const SortedCalibrationSet& set) {
    if (set.empty())
        throw errors::empty_data("fit_isotonic");

    struct Block {
        double first_score;
        double sum;
        double weight;
        double mean() const { return sum / weight; }
    };

    // Pool tied scores first so the fit cannot depend on tie order.
    std::vector<Block> blocks;
    std::size_t i = 0;
    while (i < set.size()) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < set.size() && set.score(j) == set.score(i)) {
            sum += set.label(j);
            ++j;
        }
        blocks.push_back({set.score(i), sum, static_cast<double>(j - i)});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().weight += top.weight;
        }
        i = j;
    }

    IsotonicModel model;
    model.thresholds.reserve(blocks.size());
    model.values.reserve(blocks.size());
    for (const Block& blk : blocks) {
        model.thresholds.push_back(blk.first_score);
        model.values.push_back(blk.mean());
    }
    return model;
}

} // namespace bincal
