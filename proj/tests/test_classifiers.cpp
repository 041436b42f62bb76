#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bincal/classifiers.hpp"
#include "bincal/metrics.hpp"

using namespace bincal;

TEST_CASE("zero training epochs leaves the uninformed predictor") {
    LrHyper hyper;
    hyper.epochs = 0;
    const auto model = train_lr({{0.5}, {-0.5}}, {1, 0}, hyper);
    CHECK(model.predict({0.3}) == 0.5);
    CHECK(model.predict({-2.0}) == 0.5);
}

TEST_CASE("sigmoid output fixture") {
    LrModel model;
    model.weights = {1.0};
    model.bias = 0.0;
    CHECK(predict_lr(model, {0.2}) == doctest::Approx(1.0 / (1.0 + std::exp(-0.2))));
    CHECK_THROWS_AS(predict_lr(model, {0.2, 0.4}), Error);
}

TEST_CASE("prediction is monotone in a positively weighted feature") {
    LrModel model;
    model.weights = {0.7, -0.2};
    model.bias = 0.1;
    double prev = -1.0;
    for (double v : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double p = model.predict({v, 0.3});
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("separable 1-d training reaches near-perfect ranking") {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
        const double v = u(rng);
        x.push_back({v});
        y.push_back(v > 0.1 ? 1 : 0);
    }
    const auto model = train_lr(x, y);
    std::vector<ScoredInstance> preds;
    for (std::size_t i = 0; i < x.size(); ++i)
        preds.push_back({model.predict(x[i]), y[i]});
    CHECK(auc(preds) >= 0.99);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng() % 5;
        const std::size_t n = 2 + rng() % 20;
        std::vector<std::vector<double>> x(n, std::vector<double>(d));
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                x[i][j] = u(rng);
            y[i] = static_cast<int>(rng() % 2);
        }
        std::vector<double> w(d);
        for (auto& wj : w)
            wj = u(rng);
        const double b = u(rng);
        const double l2 = 1e-3;

        std::vector<double> gw;
        double gb;
        lr_gradient(x, y, w, b, l2, gw, gb);

        const double h = 1e-6;
        for (std::size_t j = 0; j < d; ++j) {
            auto wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            const double fd = (lr_loss(x, y, wp, b, l2) - lr_loss(x, y, wm, b, l2)) / (2 * h);
            CHECK(gw[j] == doctest::Approx(fd).epsilon(1e-5));
        }
        const double fdb = (lr_loss(x, y, w, b + h, l2) - lr_loss(x, y, w, b - h, l2)) / (2 * h);
        CHECK(gb == doctest::Approx(fdb).epsilon(1e-5));
    }
}

TEST_CASE("training errors") {
    CHECK_THROWS_AS(train_lr({}, {}), Error);
    CHECK_THROWS_AS(train_lr({{0.1}, {0.2}}, {1, 1}), Error);

    // an absurd learning rate blows the weights up; the loss climbs and the
    // run is aborted
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        const double v = u(rng);
        x.push_back({v, u(rng)});
        y.push_back(v > 0 ? 1 : 0);
    }
    LrHyper wild;
    wild.learning_rate = 1e5;
    wild.epochs = 2000;
    CHECK_THROWS_AS(train_lr(x, y, wild), Error);
    try {
        train_lr(x, y, wild);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivergenceDetected);
    }
}

TEST_CASE("naive Bayes recovers hand-computed posteriors") {
    // one binary feature perfectly correlated with the class, 4 instances
    LabeledDataset data;
    data.rows = {{{}, {1}}, {{}, {1}}, {{}, {0}}, {{}, {0}}};
    data.labels = {1, 1, 0, 0};
    const auto model = train_nb(data);
    // P(f=1|z=1) = 3/4, P(f=1|z=0) = 1/4, priors 1/2
    CHECK(predict_nb(model, {{}, {1}}) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(predict_nb(model, {{}, {0}}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("uninformative features give back the prior") {
    // constant continuous feature: identical class densities cancel exactly
    LabeledDataset data;
    data.rows = {{{0.4}, {}}, {{0.4}, {}}, {{0.4}, {}}, {{0.4}, {}}};
    data.labels = {1, 1, 1, 0};
    const auto model = train_nb(data);
    CHECK(model.predict({{0.4}, {}}) == doctest::Approx(0.75).epsilon(1e-9));

    // constant categorical feature with balanced classes: smoothed tables match
    LabeledDataset balanced;
    balanced.rows = {{{}, {1}}, {{}, {1}}, {{}, {1}}, {{}, {1}}};
    balanced.labels = {1, 1, 0, 0};
    const auto even = train_nb(balanced);
    CHECK(even.predict({{}, {1}}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("duplicated features push posteriors to the extremes") {
    // the independence assumption double-counts correlated evidence
    std::mt19937_64 rng(127);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double prev = 0.0;
    for (std::size_t copies : {1u, 2u, 4u}) {
        LabeledDataset data;
        for (int i = 0; i < 200; ++i) {
            const int z = static_cast<int>(rng() % 2);
            const int f = u(rng) < (z ? 0.7 : 0.3) ? 1 : 0;
            FeatureVector fv;
            fv.cat.assign(copies, f);
            data.rows.push_back(fv);
            data.labels.push_back(z);
        }
        const auto model = train_nb(data);
        FeatureVector probe;
        probe.cat.assign(copies, 1);
        const double p = model.predict(probe);
        CHECK(p > prev);
        prev = p;
    }
    CHECK(prev > 0.8);
}

TEST_CASE("posterior and its complement sum to one") {
    std::mt19937_64 rng(131);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LabeledDataset data;
    for (int i = 0; i < 100; ++i) {
        data.rows.push_back({{u(rng), u(rng)}, {static_cast<int>(rng() % 3)}});
        data.labels.push_back(static_cast<int>(rng() % 2));
    }
    const auto model = train_nb(data);
    auto flipped = data;
    for (auto& z : flipped.labels)
        z = 1 - z;
    const auto mirror = train_nb(flipped);
    for (int i = 0; i < 20; ++i) {
        const FeatureVector probe{{u(rng), u(rng)}, {static_cast<int>(rng() % 3)}};
        CHECK(model.predict(probe) + mirror.predict(probe) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("naive Bayes guards") {
    LabeledDataset single;
    single.rows = {{{0.1}, {}}, {{0.2}, {}}};
    single.labels = {1, 1};
    CHECK_THROWS_AS(train_nb(single), Error);

    LabeledDataset ok;
    ok.rows = {{{0.1}, {}}, {{0.2}, {}}};
    ok.labels = {1, 0};
    const auto model = train_nb(ok);
    CHECK_THROWS_AS(model.predict({{0.1, 0.2}, {}}), Error);

    // constant feature exercises the variance floor
    LabeledDataset flat;
    flat.rows = {{{0.5}, {}}, {{0.5}, {}}, {{0.5}, {}}};
    flat.labels = {1, 0, 1};
    const auto flat_model = train_nb(flat);
    const double p = flat_model.predict({{0.5}, {}});
    CHECK(std::isfinite(p));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}
