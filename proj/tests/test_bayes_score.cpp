#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bincal/bayes_score.hpp"
#include "oracle.hpp"

using namespace bincal;

namespace {

SortedCalibrationSet random_set(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScoredInstance> data;
    for (std::size_t i = 0; i < n; ++i)
        data.push_back({u(rng), static_cast<int>(rng() % 2)});
    return sort_and_validate(data);
}

BinningPriorConfig fixed_gamma(double g) {
    BinningPriorConfig cfg;
    cfg.gamma_override = g;
    return cfg;
}

} // namespace

TEST_CASE("log-space helpers") {
    CHECK(LogScore::zero().is_zero());
    CHECK(LogScore::one().value == 0.0);
    CHECK(log_add(LogScore::zero(), LogScore{std::log(0.25)}).value ==
          doctest::Approx(std::log(0.25)));
    CHECK(log_mul(LogScore::zero(), LogScore::one()).is_zero());
    CHECK(log_add(LogScore{std::log(0.25)}, LogScore{std::log(0.5)}).value ==
          doctest::Approx(std::log(0.75)));
    CHECK(log_mul(LogScore{std::log(0.25)}, LogScore{std::log(0.5)}).value ==
          doctest::Approx(std::log(0.125)));
}

TEST_CASE("marginal likelihood fixtures") {
    CHECK(log_marginal_likelihood_bin(1, 1).value == doctest::Approx(std::log(1.0 / 6.0)));
    CHECK(log_marginal_likelihood_bin(0, 0).value == doctest::Approx(0.0));
    CHECK(log_marginal_likelihood_bin(2, 0).value == doctest::Approx(std::log(1.0 / 3.0)));
}

TEST_CASE("marginal likelihood is symmetric under label swap") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t a = rng() % 50;
        const std::size_t b = rng() % 50;
        CHECK(log_marginal_likelihood_bin(a, b).value ==
              doctest::Approx(log_marginal_likelihood_bin(b, a).value).epsilon(1e-12));
    }
}

TEST_CASE("appending a positive to an all-positive bin scales the likelihood by (n1+1)/(n+2)") {
    for (std::size_t n1 = 0; n1 < 60; ++n1) {
        const double diff = log_marginal_likelihood_bin(0, n1 + 1).value -
                            log_marginal_likelihood_bin(0, n1).value;
        const double expected = std::log(static_cast<double>(n1 + 1) / static_cast<double>(n1 + 2));
        CHECK(diff == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("bin prior fixtures") {
    const auto cfg = fixed_gamma(0.5);
    // singleton last bin: empty product and a certain terminal boundary
    CHECK(log_bin_prior(4, 5, cfg, 5).value == doctest::Approx(0.0));
    // single bin over everything: N-1 no-boundary factors
    CHECK(log_bin_prior(0, 5, cfg, 5).value == doctest::Approx(4.0 * std::log(0.5)));
    // N=2 first singleton: one boundary factor
    CHECK(log_bin_prior(0, 1, cfg, 2).value == doctest::Approx(std::log(0.5)));

    CHECK_THROWS_AS(log_bin_prior(3, 3, cfg, 5), Error);
    CHECK_THROWS_AS(log_bin_prior(0, 6, cfg, 5), Error);
}

TEST_CASE("bin score fixtures on the two-point set") {
    const auto set = oracle::make_set({{0.3, 0}, {0.7, 1}});
    const auto cfg = fixed_gamma(0.5);
    CHECK(log_bin_score(0, 2, set, cfg).value == doctest::Approx(std::log(1.0 / 12.0)));
    CHECK(log_bin_score(0, 1, set, cfg).value == doctest::Approx(std::log(1.0 / 4.0)));
    CHECK(log_bin_score(1, 2, set, cfg).value == doctest::Approx(std::log(1.0 / 2.0)));
}

TEST_CASE("binning score fixtures and decomposition") {
    const auto set = oracle::make_set({{0.3, 0}, {0.7, 1}});
    const auto cfg = fixed_gamma(0.5);
    CHECK(log_binning_score(make_binning(set, {1, 2}), set, cfg).value ==
          doctest::Approx(std::log(1.0 / 8.0)));
    CHECK(log_binning_score(make_binning(set, {2}), set, cfg).value ==
          doctest::Approx(std::log(1.0 / 12.0)));

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const auto rand_set = random_set(rng, 1 + rng() % 12);
        const auto rcfg = fixed_gamma(0.05 + 0.9 * (rng() % 100) / 100.0);
        std::vector<std::size_t> ends;
        for (std::size_t i = 1; i < rand_set.size(); ++i)
            if (rng() % 2)
                ends.push_back(i);
        ends.push_back(rand_set.size());
        const auto binning = make_binning(rand_set, ends);
        double sum = 0.0;
        for (const Bin& bin : binning.bins)
            sum += log_bin_score(bin.begin, bin.end, rand_set, rcfg).value;
        CHECK(log_binning_score(binning, rand_set, rcfg).value ==
              doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("total score mass matches brute-force enumeration") {
    std::mt19937_64 rng(9);
    for (std::size_t n = 1; n <= 12; ++n) {
        const auto set = random_set(rng, n);
        const double gamma = 0.05 + 0.9 * (rng() % 100) / 100.0;
        const auto cfg = fixed_gamma(gamma);
        double total = 0.0;
        oracle::for_each_binning(n, [&](const std::vector<std::size_t>& ends) {
            total += std::exp(log_binning_score(make_binning(set, ends), set, cfg).value);
        });
        const double expected = oracle::total_score_mass(set, gamma);
        CHECK(total == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("structure prior normalizes over all binnings") {
    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 12; ++n) {
        const double gamma = 0.05 + 0.9 * (rng() % 100) / 100.0;
        const auto cfg = fixed_gamma(gamma);
        const auto set = random_set(rng, n);
        double total = 0.0;
        oracle::for_each_binning(n, [&](const std::vector<std::size_t>& ends) {
            double log_prior = 0.0;
            std::size_t begin = 0;
            for (std::size_t end : ends) {
                log_prior += log_bin_prior(begin, end, cfg, n).value;
                begin = end;
            }
            total += std::exp(log_prior);
        });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("BinScorer agrees with the free functions") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const auto set = random_set(rng, 2 + rng() % 30);
        const auto cfg = fixed_gamma(0.05 + 0.9 * (rng() % 100) / 100.0);
        const BinScorer scorer(set, cfg);
        for (int k = 0; k < 20; ++k) {
            const std::size_t b = rng() % set.size();
            const std::size_t e = b + 1 + rng() % (set.size() - b);
            CHECK(scorer.bin_score(b, e) ==
                  doctest::Approx(log_bin_score(b, e, set, cfg).value).epsilon(1e-12));
        }
    }
}
