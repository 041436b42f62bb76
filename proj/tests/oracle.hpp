#pragma once

// Test-only oracles, deliberately independent of the library's scoring and
// dynamic-programming code paths: brute-force enumeration over all binnings
// in plain linear arithmetic, an exhaustive monotone-fit optimum, and a
// grid-search maximizer for the sigmoid fit. Exact factorials keep these
// honest for the small N they are used at.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "bincal/core.hpp"

namespace oracle {

inline bincal::SortedCalibrationSet make_set(const std::vector<std::pair<double, int>>& rows) {
    std::vector<bincal::ScoredInstance> data;
    data.reserve(rows.size());
    for (const auto& [score, label] : rows)
        data.push_back({score, label});
    return bincal::sort_and_validate(data);
}

inline double factorial(std::size_t m) {
    double f = 1.0;
    for (std::size_t i = 2; i <= m; ++i)
        f *= static_cast<double>(i);
    return f;
}

// Calls fn(ends) for every one of the 2^(n-1) binnings of n items, where
// `ends` lists the half-open end of each bin.
template <typename Fn>
void for_each_binning(std::size_t n, Fn&& fn) {
    const std::uint64_t masks = std::uint64_t{1} << (n - 1);
    std::vector<std::size_t> ends;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        ends.clear();
        for (std::size_t gap = 0; gap + 1 < n; ++gap)
            if (mask & (std::uint64_t{1} << gap))
                ends.push_back(gap + 1);
        ends.push_back(n);
        fn(ends);
    }
}

// Linear-domain score of one binning: product over bins of the boundary
// prior times n0! n1! / (n+1)!.
inline double binning_score(const bincal::SortedCalibrationSet& set,
                            const std::vector<std::size_t>& ends, double gamma) {
    const std::size_t n = set.size();
    double product = 1.0;
    std::size_t begin = 0;
    for (std::size_t end : ends) {
        std::size_t n1 = 0;
        for (std::size_t i = begin; i < end; ++i)
            n1 += static_cast<std::size_t>(set.label(i));
        const std::size_t n0 = (end - begin) - n1;
        double factor = (end == n) ? 1.0 : gamma;
        factor *= std::pow(1.0 - gamma, static_cast<double>(end - begin - 1));
        factor *= factorial(n0) * factorial(n1) / factorial(n0 + n1 + 1);
        product *= factor;
        begin = end;
    }
    return product;
}

struct BestBinning {
    double score = -1.0;
    std::vector<std::size_t> ends;
};

inline BestBinning best_binning(const bincal::SortedCalibrationSet& set, double gamma) {
    BestBinning best;
    for_each_binning(set.size(), [&](const std::vector<std::size_t>& ends) {
        const double s = binning_score(set, ends, gamma);
        if (s > best.score) {
            best.score = s;
            best.ends = ends;
        }
    });
    return best;
}

inline double total_score_mass(const bincal::SortedCalibrationSet& set, double gamma) {
    double total = 0.0;
    for_each_binning(set.size(),
                     [&](const std::vector<std::size_t>& ends) {
                         total += binning_score(set, ends, gamma);
                     });
    return total;
}

// Smoothed estimate of x's bin in the binning given by `ends`, locating the
// bin with midpoint edges (first bin reaches 0, last reaches 1, half-open).
inline double binning_estimate_at(const bincal::SortedCalibrationSet& set,
                                  const std::vector<std::size_t>& ends, double x) {
    std::size_t begin = 0;
    for (std::size_t j = 0; j < ends.size(); ++j) {
        const std::size_t end = ends[j];
        const double left =
            (j == 0) ? 0.0 : 0.5 * (set.score(begin - 1) + set.score(begin));
        const bool is_last = (j + 1 == ends.size());
        const double right = is_last ? 1.0 : 0.5 * (set.score(end - 1) + set.score(end));
        if (left <= x && (is_last ? x <= right : x < right)) {
            std::size_t n1 = 0;
            for (std::size_t i = begin; i < end; ++i)
                n1 += static_cast<std::size_t>(set.label(i));
            return static_cast<double>(n1 + 1) / static_cast<double>(end - begin + 2);
        }
        begin = end;
    }
    return -1.0; // unreachable for x in [0, 1]
}

// Score-weighted average over all binnings of the estimate of x's bin.
inline double averaged_estimate(const bincal::SortedCalibrationSet& set, double gamma,
                                double x) {
    double num = 0.0, den = 0.0;
    for_each_binning(set.size(), [&](const std::vector<std::size_t>& ends) {
        const double s = binning_score(set, ends, gamma);
        num += s * binning_estimate_at(set, ends, x);
        den += s;
    });
    return num / den;
}

// Minimum squared error over all monotone (non-decreasing) fits of a binary
// label sequence, by enumerating block partitions and keeping the feasible
// ones (non-decreasing block means).
inline double monotone_fit_sse(const std::vector<int>& labels) {
    double best = std::numeric_limits<double>::infinity();
    for_each_binning(labels.size(), [&](const std::vector<std::size_t>& ends) {
        double sse = 0.0;
        double prev_mean = -1.0;
        std::size_t begin = 0;
        for (std::size_t end : ends) {
            double sum = 0.0;
            for (std::size_t i = begin; i < end; ++i)
                sum += labels[i];
            const double mean = sum / static_cast<double>(end - begin);
            if (mean < prev_mean)
                return; // infeasible partition
            prev_mean = mean;
            for (std::size_t i = begin; i < end; ++i)
                sse += (labels[i] - mean) * (labels[i] - mean);
            begin = end;
        }
        best = std::min(best, sse);
    });
    return best;
}

// Coarse-to-fine grid minimizer of the mean sigmoid negative log-likelihood;
// same objective as the Newton fit, different optimizer.
struct GridFit {
    double slope = 0.0;
    double offset = 0.0;
    double loss = std::numeric_limits<double>::infinity();
};

template <typename LossFn>
GridFit platt_grid_search(LossFn&& loss, double a_lo, double a_hi, double b_lo, double b_hi,
                          int levels = 6, int steps = 40) {
    GridFit best;
    for (int level = 0; level < levels; ++level) {
        GridFit level_best;
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; j <= steps; ++j) {
                const double a = a_lo + (a_hi - a_lo) * i / steps;
                const double b = b_lo + (b_hi - b_lo) * j / steps;
                const double f = loss(a, b);
                if (f < level_best.loss)
                    level_best = {a, b, f};
            }
        }
        best = level_best;
        const double a_span = (a_hi - a_lo) / steps * 2.0;
        const double b_span = (b_hi - b_lo) / steps * 2.0;
        a_lo = best.slope - a_span;
        a_hi = best.slope + a_span;
        b_lo = best.offset - b_span;
        b_hi = best.offset + b_span;
    }
    return best;
}

} // namespace oracle
