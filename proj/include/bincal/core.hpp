#pragma once

// Shared domain types for score calibration: scored training instances, the
// sorted calibration set, index-range binnings with query edges, and the
// boundary prior configuration. Bins address the sorted set with 0-based
// half-open [begin, end) ranges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bincal/error.hpp"

namespace bincal {

// One (uncalibrated score, true class) training pair.
struct ScoredInstance {
    double score = 0.0;
    int label = 0;
};

// Training scores sorted ascending (stable for ties) with their labels and a
// prefix count of positive labels. Immutable after construction.
class SortedCalibrationSet {
public:
    SortedCalibrationSet() = default;

    std::size_t size() const noexcept { return scores_.size(); }
    bool empty() const noexcept { return scores_.empty(); }
    double score(std::size_t i) const { return scores_[i]; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<double>& scores() const noexcept { return scores_; }
    const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }

    // Number of label-1 instances in positions [begin, end).
    std::size_t ones_in(std::size_t begin, std::size_t end) const {
        return ones_prefix_[end] - ones_prefix_[begin];
    }
    std::size_t zeros_in(std::size_t begin, std::size_t end) const {
        return (end - begin) - ones_in(begin, end);
    }

    friend SortedCalibrationSet sort_and_validate(const std::vector<ScoredInstance>& data);
    static SortedCalibrationSet from_sorted(std::vector<double> scores,
                                            std::vector<std::uint8_t> labels);

private:
    std::vector<double> scores_;
    std::vector<std::uint8_t> labels_;
    std::vector<std::size_t> ones_prefix_; // ones_prefix_[i] = positives in [0, i)

    void build_prefix() {
        ones_prefix_.assign(scores_.size() + 1, 0);
        for (std::size_t i = 0; i < scores_.size(); ++i)
            ones_prefix_[i + 1] = ones_prefix_[i] + labels_[i];
    }
};

// Validates and stable-sorts training pairs by score. Ties keep input order.
inline SortedCalibrationSet sort_and_validate(const std::vector<ScoredInstance>& data) {
    if (data.empty())
        throw errors::empty_data("sort_and_validate");
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& row = data[i];
        if (!(row.score >= 0.0 && row.score <= 1.0))
            throw errors::score_out_of_range(i, row.score);
        if (row.label != 0 && row.label != 1)
            throw errors::non_binary_label(i, std::to_string(row.label));
    }
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data[a].score < data[b].score;
    });
    SortedCalibrationSet out;
    out.scores_.reserve(data.size());
    out.labels_.reserve(data.size());
    for (std::size_t i : order) {
        out.scores_.push_back(data[i].score);
        out.labels_.push_back(static_cast<std::uint8_t>(data[i].label));
    }
    out.build_prefix();
    return out;
}

// Rebuilds a set from already-sorted parallel arrays (deserialization path).
inline SortedCalibrationSet SortedCalibrationSet::from_sorted(std::vector<double> scores,
                                                              std::vector<std::uint8_t> labels) {
    if (scores.empty())
        throw errors::empty_data("SortedCalibrationSet");
    if (scores.size() != labels.size())
        throw errors::arity_mismatch("scores and labels differ in length");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0))
            throw errors::score_out_of_range(i, scores[i]);
        if (i > 0 && scores[i] < scores[i - 1])
            throw errors::invalid_spec("scores are not sorted ascending");
        if (labels[i] > 1)
            throw errors::non_binary_label(i, std::to_string(labels[i]));
    }
    SortedCalibrationSet out;
    out.scores_ = std::move(scores);
    out.labels_ = std::move(labels);
    out.build_prefix();
    return out;
}

// A contiguous index range of the sorted set plus its label counts and the
// [left_edge, right_edge) score interval it answers queries for.
struct Bin {
    std::size_t begin = 0;
    std::size_t end = 0; // half-open
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    double left_edge = 0.0;
    double right_edge = 1.0;

    std::size_t count() const noexcept { return end - begin; }
};

struct Binning {
    std::vector<Bin> bins;

    std::size_t bin_count() const noexcept { return bins.size(); }
};

// Smoothed positive-rate estimate of a bin: the posterior mean under a
// uniform prior, (n1 + 1) / (n + 2). Strictly inside (0, 1).
inline double bin_estimate(std::size_t n0, std::size_t n1) {
    return static_cast<double>(n1 + 1) / static_cast<double>(n0 + n1 + 2);
}

inline double bin_estimate(const Bin& bin) { return bin_estimate(bin.n0, bin.n1); }

// Fills query edges: interior edges are midpoints between the scores adjacent
// to the bin boundary; the first and last bins extend to 0 and 1. A bin
// answers queries x with left_edge <= x < right_edge (last bin closed at 1).
inline void assign_edges(const SortedCalibrationSet& set, Binning& binning) {
    const std::size_t b = binning.bins.size();
    for (std::size_t j = 0; j < b; ++j) {
        Bin& bin = binning.bins[j];
        bin.left_edge = (j == 0)
                            ? 0.0
                            : 0.5 * (set.score(bin.begin - 1) + set.score(bin.begin));
        bin.right_edge = (j + 1 == b)
                             ? 1.0
                             : 0.5 * (set.score(bin.end - 1) + set.score(bin.end));
    }
}

// Builds a binning from the half-open end index of each bin; `ends` must be
// strictly increasing and finish at set.size(). Counts and edges are filled.
inline Binning make_binning(const SortedCalibrationSet& set, const std::vector<std::size_t>& ends) {
    if (ends.empty() || ends.back() != set.size())
        throw errors::index_out_of_range("binning must cover the whole set");
    Binning out;
    out.bins.reserve(ends.size());
    std::size_t begin = 0;
    for (std::size_t end : ends) {
        if (end <= begin || end > set.size())
            throw errors::index_out_of_range("bin boundaries must be strictly increasing");
        Bin bin;
        bin.begin = begin;
        bin.end = end;
        bin.n1 = set.ones_in(begin, end);
        bin.n0 = (end - begin) - bin.n1;
        out.bins.push_back(bin);
        begin = end;
    }
    assign_edges(set, out);
    return out;
}

// Index of the bin containing query x: the last bin whose left edge is <= x.
// With the midpoint edges this realizes the half-open membership rule; bins
// whose interval collapsed onto a tie never match.
inline std::size_t bin_index(const Binning& binning, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw errors::query_out_of_range(x);
    std::size_t lo = 0;
    std::size_t hi = binning.bins.size(); // invariant: bins[lo].left_edge <= x
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (binning.bins[mid].left_edge <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// Boundary prior over the N-1 gaps of the sorted sequence. A homogeneous rate
// derived from the expected boundary count lambda (default sqrt(N)), capped
// away from 1; a fixed per-gap probability can be forced for experiments.
struct BinningPriorConfig {
    double lambda = 0.0;         // expected number of boundaries; <= 0 means sqrt(N)
    double gamma_cap = 0.99;     // upper bound on the per-gap probability
    double gamma_override = 0.0; // > 0 forces this exact per-gap probability

    double lambda_for(std::size_t n) const {
        return lambda > 0.0 ? lambda : std::sqrt(static_cast<double>(n));
    }

    // Per-gap boundary probability for interior gaps k = 1..N-1. The gap at
    // the end of the sequence is always a boundary and is handled separately.
    double gamma_for(std::size_t n) const {
        double g;
        if (gamma_override > 0.0) {
            g = gamma_override;
        } else if (n <= 1) {
            g = 0.5; // no interior gaps exist; value is never used
        } else {
            g = std::min(gamma_cap, lambda_for(n) / static_cast<double>(n - 1));
        }
        if (!(g > 0.0 && g < 1.0))
            throw errors::invalid_spec("per-gap boundary probability must lie in (0, 1)");
        return g;
    }
};

} // namespace bincal
