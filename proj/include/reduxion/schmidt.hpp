#pragma once

#include "reduxion/state.hpp"

#include <string>
#include <vector>

namespace reduxion {

// Singular values at or below this are treated as zero.
inline constexpr double kRankThreshold = 1e-10;
// Singular values closer than this are considered degenerate.
inline constexpr double kTieThreshold = 1e-10;

struct Bipartition {
    std::vector<std::string> gauge_modes;
    std::vector<std::string> rest_modes;
};

// All GaugeBoson modes of the system versus everything else.
Bipartition gauge_cut(const System& system);

// Throws InvalidBipartition unless the cut partitions the system's labels with a
// non-empty, all-GaugeBoson gauge side.
void validate_cut(const Bipartition& cut, const System& system);

struct SchmidtTerm {
    double coefficient = 0.0;
    PureState gauge; // on the gauge modes, in system order
    PureState rest;  // on the rest modes, in system order
};

class SchmidtDecomposition {
public:
    SchmidtDecomposition() = default;
    SchmidtDecomposition(System system, Bipartition cut, std::vector<SchmidtTerm> terms);

    const System& system() const { return system_; }
    const Bipartition& cut() const { return cut_; }
    const std::vector<SchmidtTerm>& terms() const { return terms_; }
    std::size_t rank() const { return terms_.size(); }

    // gauge_j (x) rest_j laid out in the original system order.
    PureState branch(std::size_t j) const;
    // sum_j c_j branch(j)
    PureState reconstruct() const;

private:
    System system_;
    Bipartition cut_;
    std::vector<SchmidtTerm> terms_;
};

SchmidtDecomposition schmidt_decompose(const PureState& s, const Bipartition& cut);

// w_j = c_j^2
std::vector<double> schmidt_weights(const SchmidtDecomposition& d);

// Squared singular values only (no vectors), descending, above the rank threshold.
// Cheaper than schmidt_decompose; used for entropy scans.
std::vector<double> schmidt_spectrum(const PureState& s, const Bipartition& cut);

} // namespace reduxion
