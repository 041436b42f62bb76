#pragma once

// Feature-vector datasets consumed by the base classifiers, plus the harness
// side preprocessing: standardization of continuous features and one-hot
// expansion of categorical codes.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bincal/error.hpp"

namespace bincal {

struct FeatureVector {
    std::vector<double> cont;
    std::vector<int> cat;
};

struct LabeledDataset {
    std::vector<FeatureVector> rows;
    std::vector<int> labels;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }

    void check_consistent() const {
        if (rows.size() != labels.size())
            throw errors::arity_mismatch("row and label counts differ");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].cont.size() != rows[0].cont.size() ||
                rows[i].cat.size() != rows[0].cat.size())
                throw errors::arity_mismatch("row " + std::to_string(i) +
                                             " has inconsistent feature arity");
        }
    }
};

// Zero-mean unit-variance transform learned on one split and applied to all.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;

    static Standardizer fit(const std::vector<std::vector<double>>& x) {
        Standardizer s;
        if (x.empty())
            throw errors::empty_data("Standardizer::fit");
        const std::size_t d = x[0].size();
        s.means.assign(d, 0.0);
        s.sds.assign(d, 0.0);
        for (const auto& row : x)
            for (std::size_t j = 0; j < d; ++j)
                s.means[j] += row[j];
        for (double& m : s.means)
            m /= static_cast<double>(x.size());
        for (const auto& row : x)
            for (std::size_t j = 0; j < d; ++j) {
                const double c = row[j] - s.means[j];
                s.sds[j] += c * c;
            }
        for (double& v : s.sds)
            v = std::max(std::sqrt(v / static_cast<double>(x.size())), 1e-12);
        return s;
    }

    std::vector<double> apply(const std::vector<double>& row) const {
        if (row.size() != means.size())
            throw errors::arity_mismatch("standardizer arity mismatch");
        std::vector<double> out(row.size());
        for (std::size_t j = 0; j < row.size(); ++j)
            out[j] = (row[j] - means[j]) / sds[j];
        return out;
    }

    std::vector<std::vector<double>> apply(const std::vector<std::vector<double>>& x) const {
        std::vector<std::vector<double>> out;
        out.reserve(x.size());
        for (const auto& row : x)
            out.push_back(apply(row));
        return out;
    }
};

// Expands categorical codes into indicator columns so linear models can
// consume mixed datasets; arities are learned from a reference split.
struct OneHotEncoder {
    std::vector<int> arity; // per categorical feature

    static OneHotEncoder fit(const LabeledDataset& data) {
        OneHotEncoder enc;
        if (data.empty())
            return enc;
        enc.arity.assign(data.rows[0].cat.size(), 1);
        for (const auto& row : data.rows)
            for (std::size_t j = 0; j < row.cat.size(); ++j)
                enc.arity[j] = std::max(enc.arity[j], row.cat[j] + 1);
        return enc;
    }

    std::vector<double> encode(const FeatureVector& fv) const {
        if (fv.cat.size() != arity.size())
            throw errors::arity_mismatch("one-hot arity mismatch");
        std::vector<double> out = fv.cont;
        for (std::size_t j = 0; j < fv.cat.size(); ++j) {
            const std::size_t base = out.size();
            out.resize(base + static_cast<std::size_t>(arity[j]), 0.0);
            if (fv.cat[j] >= 0 && fv.cat[j] < arity[j])
                out[base + static_cast<std::size_t>(fv.cat[j])] = 1.0;
        }
        return out;
    }

    std::vector<std::vector<double>> encode(const LabeledDataset& data) const {
        std::vector<std::vector<double>> out;
        out.reserve(data.size());
        for (const auto& row : data.rows)
            out.push_back(encode(row));
        return out;
    }
};

} // namespace bincal
