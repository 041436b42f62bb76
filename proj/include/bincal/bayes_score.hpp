#pragma once

// Bayesian score of a binning in natural-log space: per-bin boundary prior
// times the closed-form marginal likelihood of the bin's labels under a
// uniform prior on the bin's positive rate. Log space keeps N in the hundreds
// viable; factorials enter only through the log-gamma function.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "bincal/core.hpp"
#include "bincal/error.hpp"

namespace bincal {

// A probability magnitude stored as its natural log; -inf encodes zero mass.
struct LogScore {
    double value = -std::numeric_limits<double>::infinity();

    static constexpr LogScore zero() noexcept {
        return {-std::numeric_limits<double>::infinity()};
    }
    static constexpr LogScore one() noexcept { return {0.0}; }

    bool is_zero() const noexcept { return std::isinf(value) && value < 0.0; }
    double to_linear() const noexcept { return std::exp(value); }

    friend bool operator==(LogScore a, LogScore b) noexcept { return a.value == b.value; }
    friend bool operator<(LogScore a, LogScore b) noexcept { return a.value < b.value; }
};

inline double log_sum_exp(double a, double b) noexcept {
    if (std::isinf(a) && a < 0.0) return b;
    if (std::isinf(b) && b < 0.0) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Product of probabilities.
inline LogScore log_mul(LogScore a, LogScore b) noexcept {
    if (a.is_zero() || b.is_zero()) return LogScore::zero();
    return {a.value + b.value};
}

// Sum of probabilities.
inline LogScore log_add(LogScore a, LogScore b) noexcept {
    return {log_sum_exp(a.value, b.value)};
}

inline double log_factorial(std::size_t m) {
    return std::lgamma(static_cast<double>(m) + 1.0);
}

// ln( n0! n1! / (n0+n1+1)! ) — the marginal likelihood of a bin holding n0
// negatives and n1 positives. Exactly 0 for the empty bin.
inline LogScore log_marginal_likelihood_bin(std::size_t n0, std::size_t n1) {
    return {log_factorial(n0) + log_factorial(n1) - log_factorial(n0 + n1 + 1)};
}

// ln prior of the boundaries delimiting bin [begin, end) in a set of n items:
// one boundary factor at the bin's end (probability 1 when end == n) and a
// no-boundary factor for each interior gap the bin spans.
inline LogScore log_bin_prior(std::size_t begin, std::size_t end,
                              const BinningPriorConfig& cfg, std::size_t n) {
    if (begin >= end || end > n)
        throw errors::index_out_of_range("bin range invalid for prior");
    const double gamma = cfg.gamma_for(n);
    double v = (end == n) ? 0.0 : std::log(gamma);
    v += static_cast<double>(end - begin - 1) * std::log1p(-gamma);
    return {v};
}

// ln of the full per-bin factor: boundary prior times marginal likelihood.
inline LogScore log_bin_score(std::size_t begin, std::size_t end,
                              const SortedCalibrationSet& set,
                              const BinningPriorConfig& cfg) {
    if (begin >= end || end > set.size())
        throw errors::index_out_of_range("bin range invalid for score");
    const std::size_t n1 = set.ones_in(begin, end);
    const std::size_t n0 = (end - begin) - n1;
    return log_mul(log_bin_prior(begin, end, cfg, set.size()),
                   log_marginal_likelihood_bin(n0, n1));
}

// ln score of a whole binning; the per-bin factors are independent, so the
// log score is the plain sum. This decomposability is what the dynamic
// programs below rely on.
inline LogScore log_binning_score(const Binning& binning, const SortedCalibrationSet& set,
                                  const BinningPriorConfig& cfg) {
    LogScore total = LogScore::one();
    for (const Bin& bin : binning.bins)
        total = log_mul(total, log_bin_score(bin.begin, bin.end, set, cfg));
    return total;
}

// Precomputed tables making any bin score an O(1) lookup: prefix label
// counts live in the set, log factorials and the gap-prior logs live here.
class BinScorer {
public:
    BinScorer(const SortedCalibrationSet& set, const BinningPriorConfig& cfg)
        : set_(&set),
          n_(set.size()),
          gamma_(cfg.gamma_for(set.size())),
          log_gamma_(std::log(gamma_)),
          log_1m_gamma_(std::log1p(-gamma_)) {
        log_fact_.resize(n_ + 2);
        for (std::size_t m = 0; m < log_fact_.size(); ++m)
            log_fact_[m] = log_factorial(m);
    }

    std::size_t size() const noexcept { return n_; }
    double gamma() const noexcept { return gamma_; }

    double marginal(std::size_t begin, std::size_t end) const {
        assert(begin < end && end <= n_);
        const std::size_t n1 = set_->ones_in(begin, end);
        const std::size_t n = end - begin;
        return log_fact_[n - n1] + log_fact_[n1] - log_fact_[n + 1];
    }

    double prior(std::size_t begin, std::size_t end) const {
        assert(begin < end && end <= n_);
        double v = (end == n_) ? 0.0 : log_gamma_;
        return v + static_cast<double>(end - begin - 1) * log_1m_gamma_;
    }

    double bin_score(std::size_t begin, std::size_t end) const {
        return prior(begin, end) + marginal(begin, end);
    }

    double estimate(std::size_t begin, std::size_t end) const {
        const std::size_t n1 = set_->ones_in(begin, end);
        return bin_estimate((end - begin) - n1, n1);
    }

private:
    const SortedCalibrationSet* set_;
    std::size_t n_;
    double gamma_;
    double log_gamma_;
    double log_1m_gamma_;
    std::vector<double> log_fact_;
};

} // namespace bincal
