#pragma once

// Evaluation measures for probabilistic binary predictions: accuracy, AUC
// (midrank Mann-Whitney), RMSE, and the expected / maximum calibration errors
// over ten fixed probability bins, with the per-bin reliability rows kept for
// export.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <vector>

#include "bincal/core.hpp"
#include "bincal/error.hpp"

namespace bincal {

// Fraction of predictions on the label's side of the threshold; a prediction
// equal to the threshold counts as positive.
inline double accuracy(const std::vector<ScoredInstance>& preds, double threshold = 0.5) {
    if (preds.empty())
        throw errors::empty_data("accuracy");
    std::size_t hits = 0;
    for (const auto& pr : preds)
        hits += ((pr.score >= threshold) ? 1 : 0) == pr.label;
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

// Probability that a random positive outranks a random negative, ties
// counting half; computed from midranks in O(n log n).
inline double auc(const std::vector<ScoredInstance>& preds) {
    if (preds.empty())
        throw errors::empty_data("auc");
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].score < preds[b].score;
    });

    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && preds[order[j + 1]].score == preds[order[i]].score)
            ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (preds[order[k]].label == 1) {
                pos_rank_sum += midrank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const std::size_t n_neg = preds.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw errors::single_class_data("auc");
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double rmse(const std::vector<ScoredInstance>& preds) {
    if (preds.empty())
        throw errors::empty_data("rmse");
    double sum = 0.0;
    for (const auto& pr : preds) {
        const double d = pr.score - static_cast<double>(pr.label);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(preds.size()));
}

// One nonempty reliability bin: its probability interval, the share of all
// instances in it, the observed positive rate and the mean prediction.
struct ReliabilityRow {
    std::size_t bin = 0; // 0..9
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double fraction = 0.0;       // P(i)
    double outcome_rate = 0.0;   // o_i
    double mean_predicted = 0.0; // e_i
};

struct EceMce {
    double ece = 0.0;
    double mce = 0.0;
    std::vector<ReliabilityRow> rows;
};

// Ten fixed bins [0,.1), [.1,.2), ..., [.9,1]; a prediction of exactly 1
// falls in the last bin. Empty bins contribute to neither measure.
inline EceMce ece_mce(const std::vector<ScoredInstance>& preds) {
    if (preds.empty())
        throw errors::empty_data("ece_mce");
    constexpr std::size_t kBins = 10;
    std::vector<std::size_t> count(kBins, 0), positives(kBins, 0);
    std::vector<double> pred_sum(kBins, 0.0);
    for (const auto& pr : preds) {
        std::size_t idx = static_cast<std::size_t>(pr.score * 10.0);
        if (idx >= kBins) idx = kBins - 1;
        ++count[idx];
        positives[idx] += static_cast<std::size_t>(pr.label);
        pred_sum[idx] += pr.score;
    }

    EceMce out;
    const double n = static_cast<double>(preds.size());
    for (std::size_t i = 0; i < kBins; ++i) {
        if (count[i] == 0)
            continue;
        ReliabilityRow row;
        row.bin = i;
        row.lo = static_cast<double>(i) / 10.0;
        row.hi = static_cast<double>(i + 1) / 10.0;
        row.count = count[i];
        row.fraction = static_cast<double>(count[i]) / n;
        row.outcome_rate = static_cast<double>(positives[i]) / static_cast<double>(count[i]);
        row.mean_predicted = pred_sum[i] / static_cast<double>(count[i]);
        const double gap = std::abs(row.outcome_rate - row.mean_predicted);
        out.ece += row.fraction * gap;
        out.mce = std::max(out.mce, gap);
        out.rows.push_back(row);
    }
    return out;
}

// All five measures for one prediction set.
struct EvalReport {
    double acc = 0.0;
    double auc = 0.0;
    double rmse = 0.0;
    double ece = 0.0;
    double mce = 0.0;
    std::size_t n_test = 0;
    std::vector<ReliabilityRow> reliability;
};

inline EvalReport evaluate(const std::vector<ScoredInstance>& preds,
                           double accuracy_threshold = 0.5) {
    EvalReport report;
    report.acc = accuracy(preds, accuracy_threshold);
    report.auc = auc(preds);
    report.rmse = rmse(preds);
    EceMce cal = ece_mce(preds);
    report.ece = cal.ece;
    report.mce = cal.mce;
    report.n_test = preds.size();
    report.reliability = std::move(cal.rows);
    return report;
}

inline void write_reliability_csv(std::ostream& os, const std::vector<ReliabilityRow>& rows) {
    os << "bin_lo,bin_hi,count,P_i,o_i,e_i\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f,%zu,%.12g,%.12g,%.12g\n", row.lo, row.hi,
                      row.count, row.fraction, row.outcome_rate, row.mean_predicted);
        os << buf;
    }
}

} // namespace bincal
