#pragma once

// Seeded generators for the three simulated two-feature configurations:
// linearly separable, XOR quadrants, and a centered disk whose radius makes
// the classes balanced in expectation. Features are uniform on [-1, 1]^2 and
// the three splits come from independent counter-based streams.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

#include "bincal/dataset.hpp"
#include "bincal/error.hpp"
#include "bincal/rng.hpp"

namespace bincal {

enum class SimPattern { Linear, Xor, Circular };

inline std::string pattern_name(SimPattern p) {
    switch (p) {
    case SimPattern::Linear: return "linear";
    case SimPattern::Xor: return "xor";
    case SimPattern::Circular: return "circular";
    }
    return "?";
}

inline SimPattern pattern_from_name(const std::string& name) {
    if (name == "linear") return SimPattern::Linear;
    if (name == "xor") return SimPattern::Xor;
    if (name == "circular") return SimPattern::Circular;
    throw errors::invalid_spec("unknown pattern '" + name + "'");
}

struct SimSpec {
    SimPattern pattern = SimPattern::Xor;
    std::size_t n_train = 600;
    std::size_t n_calib = 600;
    std::size_t n_test = 600;
    std::uint64_t seed = 0;
    double noise = 0.0; // independent label-flip probability

    void validate() const {
        if (n_train < 1 || n_calib < 1 || n_test < 1)
            throw errors::invalid_spec("split sizes must be at least 1");
        if (!(noise >= 0.0 && noise < 0.5))
            throw errors::invalid_spec("noise must lie in [0, 0.5)");
    }
};

inline int sim_label(SimPattern pattern, double x1, double x2) {
    switch (pattern) {
    case SimPattern::Linear:
        return x1 + x2 > 0.0;
    case SimPattern::Xor:
        return x1 * x2 > 0.0;
    case SimPattern::Circular:
        // disk covering half the square's area
        return x1 * x1 + x2 * x2 < 2.0 / std::numbers::pi;
    }
    return 0;
}

struct SimData {
    LabeledDataset train;
    LabeledDataset calib;
    LabeledDataset test;
};

inline SimData generate(const SimSpec& spec) {
    spec.validate();
    auto draw_split = [&](std::uint64_t split_id, std::size_t count) {
        CounterRng features(spec.seed, split_id * 2);
        CounterRng flips(spec.seed, split_id * 2 + 1);
        LabeledDataset data;
        data.rows.reserve(count);
        data.labels.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double x1 = features.next_symmetric();
            const double x2 = features.next_symmetric();
            int label = sim_label(spec.pattern, x1, x2);
            if (spec.noise > 0.0 && flips.next_unit() < spec.noise)
                label = 1 - label;
            data.rows.push_back({{x1, x2}, {}});
            data.labels.push_back(label);
        }
        return data;
    };
    SimData out;
    out.train = draw_split(0, spec.n_train);
    out.calib = draw_split(1, spec.n_calib);
    out.test = draw_split(2, spec.n_test);
    return out;
}

} // namespace bincal
