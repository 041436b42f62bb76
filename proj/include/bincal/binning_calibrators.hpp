#pragma once

// The binning calibrators. Two Bayesian ones built on the same score:
//  - selection: dynamic program over bin ends picks the single best-scoring
//    binning of the sorted calibration scores;
//  - averaging: forward/backward sum recurrences accumulate the score mass of
//    all 2^(N-1) binnings, so a query can be answered with the exact
//    score-weighted average over every binning, grouped by the bin containing
//    the query. An equal-width cache of the averaged curve gives O(1) recall.
// Plus the classic equal-frequency histogram binning baseline.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bincal/bayes_score.hpp"
#include "bincal/core.hpp"
#include "bincal/error.hpp"

namespace bincal {

namespace detail {

inline double edge_lookup(const Binning& binning, const std::vector<double>& estimates,
                          double x) {
    return estimates[bin_index(binning, x)];
}

} // namespace detail

// Best single binning under the Bayesian score, with smoothed per-bin
// estimates. Immutable after fit; queries are a binary search over edges.
struct SbbModel {
    Binning binning;
    std::vector<double> estimates;
    std::size_t n = 0;
    double lambda = 0.0;
    double gamma = 0.0;
    LogScore log_score = LogScore::zero();

    double calibrate(double x) const { return detail::edge_lookup(binning, estimates, x); }
};

// Dynamic program over prefixes: best[e] is the top score over all binnings
// of the first e items. Scanning the last bin's begin from e-1 down to 0 with
// strict improvement makes tie-breaking deterministic (latest split wins).
inline SbbModel fit_sbb(const SortedCalibrationSet& set, const BinningPriorConfig& cfg) {
    if (set.empty())
        throw errors::empty_data("fit_sbb");
    const std::size_t n = set.size();
    const BinScorer scorer(set, cfg);

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> best(n + 1, neg_inf);
    std::vector<std::size_t> back(n + 1, 0);
    best[0] = 0.0;
    for (std::size_t e = 1; e <= n; ++e) {
        double top = neg_inf;
        std::size_t arg = e - 1;
        for (std::size_t b = e; b-- > 0;) {
            const double cand = best[b] + scorer.bin_score(b, e);
            if (cand > top) {
                top = cand;
                arg = b;
            }
        }
        best[e] = top;
        back[e] = arg;
    }

    std::vector<std::size_t> ends;
    for (std::size_t e = n; e > 0; e = back[e])
        ends.push_back(e);
    std::reverse(ends.begin(), ends.end());

    SbbModel model;
    model.binning = make_binning(set, ends);
    model.estimates.reserve(model.binning.bins.size());
    for (const Bin& bin : model.binning.bins)
        model.estimates.push_back(bin_estimate(bin));
    model.n = n;
    model.lambda = cfg.lambda_for(n);
    model.gamma = scorer.gamma();
    model.log_score = {best[n]};
    return model;
}

// Exact model averaging over all binnings. forward[e] (resp. backward[b]) is
// the log of the total score mass of all binnings of the first e (resp. last
// n-b) items; forward[0] = backward[n] = 0 and forward[n] = backward[0] is
// the grand total.
struct AbbModel {
    SortedCalibrationSet set;
    double lambda = 0.0;
    double gamma = 0.0;
    std::vector<double> forward;
    std::vector<double> backward;

    double total_log_mass() const { return forward.back(); }

    // Exact averaged estimate at x: over every range [b, e) whose query
    // interval contains x, weight the range's smoothed estimate by the mass
    // of all binnings in which [b, e) appears as a bin. Each binning has
    // exactly one such bin, so the weights used also normalize the sum.
    double calibrate(double x) const {
        if (!(x >= 0.0 && x <= 1.0))
            throw errors::query_out_of_range(x);
        const std::size_t n = set.size();

        // Largest begin whose bin would reach left to x.
        std::size_t b_lo = 0, b_hi = n - 1;
        while (b_hi > b_lo) {
            const std::size_t mid = b_lo + (b_hi - b_lo + 1) / 2;
            if (0.5 * (set.score(mid - 1) + set.score(mid)) <= x)
                b_lo = mid;
            else
                b_hi = mid - 1;
        }
        const std::size_t max_begin = b_lo;

        // Smallest end whose bin would reach right past x.
        std::size_t e_lo = 1, e_hi = n;
        while (e_lo < e_hi) {
            const std::size_t mid = e_lo + (e_hi - e_lo) / 2;
            if (x < 0.5 * (set.score(mid - 1) + set.score(mid)))
                e_hi = mid;
            else
                e_lo = mid + 1;
        }
        const std::size_t min_end = e_lo;

        const double z = forward[n];
        double num = 0.0, den = 0.0;
        for (std::size_t b = 0; b <= max_begin; ++b) {
            const double base = forward[b] - z;
            for (std::size_t e = std::max(b + 1, min_end); e <= n; ++e) {
                const double w = std::exp(base + range_score(b, e) + backward[e]);
                den += w;
                num += w * range_estimate(b, e);
            }
        }
        return num / den;
    }

    double range_score(std::size_t b, std::size_t e) const {
        const std::size_t n1 = set.ones_in(b, e);
        const std::size_t len = e - b;
        double v = (e == set.size()) ? 0.0 : log_gamma_;
        v += static_cast<double>(len - 1) * log_1m_gamma_;
        return v + log_fact_[len - n1] + log_fact_[n1] - log_fact_[len + 1];
    }

    double range_estimate(std::size_t b, std::size_t e) const {
        const std::size_t n1 = set.ones_in(b, e);
        return bin_estimate((e - b) - n1, n1);
    }

    friend AbbModel fit_abb(const SortedCalibrationSet&, const BinningPriorConfig&);

private:
    double log_gamma_ = 0.0;
    double log_1m_gamma_ = 0.0;
    std::vector<double> log_fact_;
};

inline AbbModel fit_abb(const SortedCalibrationSet& set, const BinningPriorConfig& cfg) {
    if (set.empty())
        throw errors::empty_data("fit_abb");
    const std::size_t n = set.size();

    AbbModel model;
    model.set = set;
    model.lambda = cfg.lambda_for(n);
    model.gamma = cfg.gamma_for(n);
    model.log_gamma_ = std::log(model.gamma);
    model.log_1m_gamma_ = std::log1p(-model.gamma);
    model.log_fact_.resize(n + 2);
    for (std::size_t m = 0; m < model.log_fact_.size(); ++m)
        model.log_fact_[m] = log_factorial(m);

    auto accumulate = [](const std::vector<double>& terms) {
        double m = -std::numeric_limits<double>::infinity();
        for (double t : terms) m = std::max(m, t);
        double s = 0.0;
        for (double t : terms) s += std::exp(t - m);
        return m + std::log(s);
    };

    model.forward.assign(n + 1, 0.0);
    std::vector<double> terms;
    for (std::size_t e = 1; e <= n; ++e) {
        terms.clear();
        for (std::size_t b = 0; b < e; ++b)
            terms.push_back(model.forward[b] + model.range_score(b, e));
        model.forward[e] = accumulate(terms);
    }

    model.backward.assign(n + 1, 0.0);
    for (std::size_t b = n; b-- > 0;) {
        terms.clear();
        for (std::size_t e = b + 1; e <= n; ++e)
            terms.push_back(model.range_score(b, e) + model.backward[e]);
        model.backward[b] = accumulate(terms);
    }

    assert(std::abs(model.forward[n] - model.backward[0]) <= 1e-9);
    return model;
}

// The averaged curve sampled at the centers of `cells` equal-width cells of
// [0, 1]; recall is a single array lookup.
struct CachedAbbModel {
    std::size_t cells = 0;
    std::vector<double> values;
    std::size_t n = 0;
    double lambda = 0.0;
    double gamma = 0.0;

    double calibrate(double x) const {
        if (!(x >= 0.0 && x <= 1.0))
            throw errors::query_out_of_range(x);
        std::size_t idx = static_cast<std::size_t>(x * static_cast<double>(cells));
        if (idx >= cells) idx = cells - 1;
        return values[idx];
    }
};

inline CachedAbbModel cache_abb(const AbbModel& model, std::size_t cells) {
    if (cells < 2)
        throw errors::invalid_bin_count("cache needs at least 2 cells");
    CachedAbbModel cached;
    cached.cells = cells;
    cached.n = model.set.size();
    cached.lambda = model.lambda;
    cached.gamma = model.gamma;
    cached.values.reserve(cells);
    for (std::size_t i = 0; i < cells; ++i)
        cached.values.push_back(
            model.calibrate((static_cast<double>(i) + 0.5) / static_cast<double>(cells)));
    return cached;
}

inline CachedAbbModel fit_abb_cached(const SortedCalibrationSet& set,
                                     const BinningPriorConfig& cfg, std::size_t cells = 100) {
    return cache_abb(fit_abb(set, cfg), cells);
}

// Equal-frequency histogram binning with smoothed per-bin estimates.
struct HistogramModel {
    Binning binning;
    std::vector<double> estimates;
    std::size_t n = 0;
    std::size_t requested_bins = 0;

    double calibrate(double x) const { return detail::edge_lookup(binning, estimates, x); }
};

inline HistogramModel fit_histogram(const SortedCalibrationSet& set, std::size_t k = 10) {
    if (set.empty())
        throw errors::empty_data("fit_histogram");
    if (k < 1 || k > set.size())
        throw errors::invalid_bin_count("bin count must satisfy 1 <= k <= N, got " +
                                        std::to_string(k));
    const std::size_t n = set.size();
    std::vector<std::size_t> ends;
    ends.reserve(k);
    for (std::size_t j = 1; j <= k; ++j)
        ends.push_back(j * n / k);

    HistogramModel model;
    model.binning = make_binning(set, ends);
    model.estimates.reserve(k);
    for (const Bin& bin : model.binning.bins)
        model.estimates.push_back(bin_estimate(bin));
    model.n = n;
    model.requested_bins = k;
    return model;
}

} // namespace bincal
