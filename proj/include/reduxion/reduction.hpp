#pragma once

#include "reduxion/rng.hpp"
#include "reduxion/schmidt.hpp"
#include "reduxion/state.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace reduxion {

// Shannon entropy in nats, 0 ln 0 := 0. Throws BadDistribution unless the weights are
// non-negative and sum to 1 within 1e-8.
double reduction_entropy(std::span<const double> weights);

struct EntropySample {
    double t = 0.0;
    std::vector<double> weights;
    double sigma = 0.0;
};

enum class InstantKind { HalfCrossing, StationaryWeights, Plateau, None };

const char* to_string(InstantKind kind) noexcept;

struct SolverConfig {
    int grid_points = 1000;            // bracketing grid over the horizon
    double t_tol_rel = 1e-12;          // refinement tolerance, relative to the horizon
    double plateau_eps = 1e-12;        // sigma band below the supremum that counts as reached
    int max_iter = 200;                // refinement iteration cap
    double derivative_step_rel = 1e-7; // central-difference step for d sigma/dt, relative to the horizon
};

struct ReductionInstant {
    double t_red = 0.0;
    InstantKind kind = InstantKind::None;
    std::vector<double> weights_at;
    double sigma_at = 0.0;
};

using WeightTrace = std::function<std::vector<double>(double)>;
using StateFlow = std::function<PureState(double)>;

// Earliest local maximum of sigma(t) = reduction_entropy(trace(t)) on
// [t_start, t_start + horizon]. Local maxima are bracketed on the grid and refined by
// bisection on the sign of d sigma/dt; a nondecreasing sigma is reduced when it enters
// the plateau_eps band below its supremum. Returns kind None when sigma vanishes on the
// whole window. Throws NonConvergent when refinement does not converge or sigma is still
// rising at the end of the window.
ReductionInstant find_entropy_maximum(const WeightTrace& trace, double t_start, double horizon,
                                      const SolverConfig& solver = {});

ReductionInstant find_reduction_instant(const std::function<SchmidtDecomposition(double)>& traj,
                                        double t_start, double horizon, const SolverConfig& solver = {});

// Same, driven by a state trajectory and a cut; uses the singular values only.
ReductionInstant find_reduction_instant(const StateFlow& flow, const Bipartition& cut, double t_start,
                                        double horizon, const SolverConfig& solver = {});

struct ReductionEvent {
    int stage = 0;
    double t_red = 0.0;   // measured from the start of the stage
    double t_abs = 0.0;   // measured from the start of the cascade
    InstantKind kind = InstantKind::None;
    std::size_t outcome_index = 0;
    double probability = 1.0;
    PureState post_state;
    std::string outcome_label;
};

// Index j with u * sum(w) in [w_0 + ... + w_{j-1}, w_0 + ... + w_j), for u in [0, 1).
std::size_t pick_outcome(std::span<const double> weights, double u);

// Draws outcome j with probability c_j^2; the post-jump state is gauge_j (x) rest_j.
ReductionEvent sample_jump(const SchmidtDecomposition& d, double t_red, Rng& rng);

struct Branch {
    double probability = 0.0;
    PureState state;
};

std::vector<Branch> enumerate_jump(const SchmidtDecomposition& d);

// Branches |k j_k> with probability p_k w_{k j_k}, member by member.
std::vector<Branch> reduce_ensemble(const Ensemble& e, const Bipartition& cut);

// Eigenvalues of sum_k p_k sum_j w_kj |kj><kj| (descending), and its von Neumann entropy.
std::vector<double> mixed_reduction_spectrum(const Ensemble& e, const Bipartition& cut);
double mixed_reduction_entropy(const Ensemble& e, const Bipartition& cut);

struct OptConfig {
    int theta_points = 24; // coarse grid over theta in [0, pi/2]
    int phi_points = 48;   // coarse grid over phi in [0, 2 pi)
    int starts = 4;        // local refinements launched from the best grid points
    double step_tol = 1e-9;
};

// Alternative representation of the same density operator: the two members' purification
// amplitudes mixed by [[cos t, e^{i p} sin t], [-e^{-i p} sin t, cos t]]. Members whose
// weight vanishes are dropped.
Ensemble mix_representation(const Ensemble& e, double theta, double phi);

struct RepresentationResult {
    Ensemble representation;
    double sigma_max = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

// Maximizes mixed_reduction_entropy over mix_representation(e, theta, phi). Single-member
// ensembles are returned unchanged; more than two members throw UnsupportedEnsembleSize.
RepresentationResult maximize_representation_entropy(const Ensemble& e, const Bipartition& cut,
                                                      const OptConfig& opt = {});

} // namespace reduxion
