#pragma once

// Minimal base classifiers producing the uncalibrated probabilities the
// calibrators consume: batch-gradient logistic regression on continuous
// features and naive Bayes with Laplace-smoothed categorical tables and
// per-class Gaussian likelihoods for continuous features.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "bincal/dataset.hpp"
#include "bincal/error.hpp"

namespace bincal {

struct LrHyper {
    double learning_rate = 0.1;
    std::size_t epochs = 20000;
    double l2 = 1e-4;
};

struct LrModel {
    std::vector<double> weights;
    double bias = 0.0;
    LrHyper hyper;

    double predict(const std::vector<double>& x) const {
        if (x.size() != weights.size())
            throw errors::arity_mismatch("predict expects " + std::to_string(weights.size()) +
                                         " features, got " + std::to_string(x.size()));
        double z = bias;
        for (std::size_t j = 0; j < x.size(); ++j)
            z += weights[j] * x[j];
        return 1.0 / (1.0 + std::exp(-z));
    }
};

// Mean L2-regularized log-loss and its gradient; exposed so the analytic
// gradient can be cross-checked by finite differences.
inline double lr_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      const std::vector<double>& w, double b, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j)
            z += w[j] * x[i][j];
        // log-loss written via softplus for stability
        loss += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) -
                static_cast<double>(y[i]) * z;
    }
    loss /= static_cast<double>(x.size());
    double reg = 0.0;
    for (double wj : w)
        reg += wj * wj;
    return loss + 0.5 * l2 * reg;
}

inline void lr_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double l2,
                        std::vector<double>& gw, double& gb) {
    gw.assign(w.size(), 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j)
            z += w[j] * x[i][j];
        const double err = 1.0 / (1.0 + std::exp(-z)) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < w.size(); ++j)
            gw[j] += err * x[i][j];
        gb += err;
    }
    const double inv_n = 1.0 / static_cast<double>(x.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        gw[j] = gw[j] * inv_n + l2 * w[j];
    gb *= inv_n;
}

inline LrModel train_lr(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        LrHyper hyper = {}) {
    if (x.empty() || y.empty())
        throw errors::empty_data("train_lr");
    if (x.size() != y.size())
        throw errors::arity_mismatch("feature and label counts differ");
    bool has_pos = false, has_neg = false;
    for (int label : y)
        (label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw errors::single_class_data("train_lr");

    LrModel model;
    model.hyper = hyper;
    model.weights.assign(x[0].size(), 0.0);
    model.bias = 0.0;

    std::vector<double> gw;
    double gb = 0.0;
    double prev_loss = lr_loss(x, y, model.weights, model.bias, hyper.l2);
    std::size_t rising = 0;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        lr_gradient(x, y, model.weights, model.bias, hyper.l2, gw, gb);
        for (std::size_t j = 0; j < model.weights.size(); ++j)
            model.weights[j] -= hyper.learning_rate * gw[j];
        model.bias -= hyper.learning_rate * gb;

        const double loss = lr_loss(x, y, model.weights, model.bias, hyper.l2);
        rising = (loss > prev_loss) ? rising + 1 : 0;
        if (rising >= 10)
            throw errors::divergence_detected(epoch, loss);
        prev_loss = loss;
    }
    return model;
}

inline double predict_lr(const LrModel& model, const std::vector<double>& x) {
    return model.predict(x);
}

struct NbModel {
    std::array<double, 2> log_prior{};
    std::array<std::size_t, 2> class_count{};
    std::vector<int> cat_arity;
    // [class][feature][code] -> log P(code | class), Laplace-smoothed
    std::array<std::vector<std::vector<double>>, 2> cat_log_lik;
    std::array<std::vector<double>, 2> gauss_mean;
    std::array<std::vector<double>, 2> gauss_var;

    // Posterior P(z = 1 | x), computed in log domain and normalized.
    double predict(const FeatureVector& fv) const {
        if (fv.cat.size() != cat_arity.size() || fv.cont.size() != gauss_mean[0].size())
            throw errors::arity_mismatch("naive Bayes feature arity mismatch");
        std::array<double, 2> lp = log_prior;
        for (int z = 0; z < 2; ++z) {
            for (std::size_t j = 0; j < fv.cat.size(); ++j) {
                const int code = fv.cat[j];
                if (code >= 0 && code < cat_arity[j]) {
                    lp[z] += cat_log_lik[z][j][static_cast<std::size_t>(code)];
                } else {
                    // unseen category: the Laplace mass of an unobserved cell
                    lp[z] += -std::log(static_cast<double>(class_count[z] + cat_arity[j]));
                }
            }
            for (std::size_t j = 0; j < fv.cont.size(); ++j) {
                const double var = gauss_var[z][j];
                const double d = fv.cont[j] - gauss_mean[z][j];
                lp[z] += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
            }
        }
        const double m = std::max(lp[0], lp[1]);
        const double e0 = std::exp(lp[0] - m);
        const double e1 = std::exp(lp[1] - m);
        return e1 / (e0 + e1);
    }
};

inline NbModel train_nb(const LabeledDataset& data) {
    if (data.empty())
        throw errors::empty_data("train_nb");
    data.check_consistent();

    NbModel model;
    const std::size_t n = data.size();
    for (int label : data.labels) {
        if (label != 0 && label != 1)
            throw errors::non_binary_label(0, std::to_string(label));
        ++model.class_count[static_cast<std::size_t>(label)];
    }
    if (model.class_count[0] == 0 || model.class_count[1] == 0)
        throw errors::single_class_data("train_nb");
    for (int z = 0; z < 2; ++z)
        model.log_prior[z] =
            std::log(static_cast<double>(model.class_count[z]) / static_cast<double>(n));

    const std::size_t n_cat = data.rows[0].cat.size();
    const std::size_t n_cont = data.rows[0].cont.size();
    model.cat_arity.assign(n_cat, 1);
    for (const auto& row : data.rows)
        for (std::size_t j = 0; j < n_cat; ++j) {
            if (row.cat[j] < 0)
                throw errors::invalid_spec("categorical codes must be non-negative");
            model.cat_arity[j] = std::max(model.cat_arity[j], row.cat[j] + 1);
        }

    for (int z = 0; z < 2; ++z) {
        model.cat_log_lik[z].resize(n_cat);
        for (std::size_t j = 0; j < n_cat; ++j)
            model.cat_log_lik[z][j].assign(static_cast<std::size_t>(model.cat_arity[j]), 0.0);
        model.gauss_mean[z].assign(n_cont, 0.0);
        model.gauss_var[z].assign(n_cont, 0.0);
    }

    std::array<std::vector<std::vector<std::size_t>>, 2> cat_count;
    for (int z = 0; z < 2; ++z) {
        cat_count[z].resize(n_cat);
        for (std::size_t j = 0; j < n_cat; ++j)
            cat_count[z][j].assign(static_cast<std::size_t>(model.cat_arity[j]), 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int z = data.labels[i];
        for (std::size_t j = 0; j < n_cat; ++j)
            ++cat_count[z][j][static_cast<std::size_t>(data.rows[i].cat[j])];
        for (std::size_t j = 0; j < n_cont; ++j)
            model.gauss_mean[z][j] += data.rows[i].cont[j];
    }
    for (int z = 0; z < 2; ++z) {
        for (std::size_t j = 0; j < n_cat; ++j)
            for (int code = 0; code < model.cat_arity[j]; ++code)
                model.cat_log_lik[z][j][static_cast<std::size_t>(code)] = std::log(
                    (static_cast<double>(cat_count[z][j][static_cast<std::size_t>(code)]) + 1.0) /
                    static_cast<double>(model.class_count[z] + model.cat_arity[j]));
        for (std::size_t j = 0; j < n_cont; ++j)
            model.gauss_mean[z][j] /= static_cast<double>(model.class_count[z]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int z = data.labels[i];
        for (std::size_t j = 0; j < n_cont; ++j) {
            const double d = data.rows[i].cont[j] - model.gauss_mean[z][j];
            model.gauss_var[z][j] += d * d;
        }
    }
    for (int z = 0; z < 2; ++z)
        for (std::size_t j = 0; j < n_cont; ++j)
            model.gauss_var[z][j] = std::max(
                model.gauss_var[z][j] / static_cast<double>(model.class_count[z]), 1e-6);

    return model;
}

inline double predict_nb(const NbModel& model, const FeatureVector& fv) {
    return model.predict(fv);
}

} // namespace bincal
