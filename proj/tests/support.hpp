#pragma once

#include "reduxion/state.hpp"

#include <random>

namespace test_support {

// Gaussian amplitudes on every basis label of `sys`, normalized.
inline reduxion::PureState random_state(const reduxion::System& sys, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    reduxion::StateBuilder b(sys);
    reduxion::Occupations occ(sys.size(), 0);
    for (std::size_t n = 0; n < sys.dimension(); ++n) {
        b.add(occ, {g(gen), g(gen)});
        for (std::size_t i = sys.size(); i-- > 0;) {
            if (++occ[i] < sys.mode(i).dimension) break;
            occ[i] = 0;
        }
    }
    return reduxion::normalize(std::move(b).build());
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

} // namespace test_support
