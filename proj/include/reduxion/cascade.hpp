#pragma once

#include "reduxion/reduction.hpp"
#include "reduxion/rng.hpp"
#include "reduxion/schmidt.hpp"
#include "reduxion/state.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace reduxion {

// Evolution of one stage: the state as a function of time since the stage began,
// and the window the instant solver searches.
struct StageFlow {
    StateFlow flow;
    double horizon = 1.0;
};

// stage is 1-based; `state` is the post-jump state of the previous stage (or the initial state)
using StageRule = std::function<StageFlow(const PureState& state, int stage)>;
using TerminalRule = std::function<bool(const PureState& state, int completed_stages)>;
using OutcomeLabeler = std::function<std::string(const PureState& state)>;

struct Scenario {
    std::string name;
    System system;
    std::variant<PureState, Ensemble> initial;
    Bipartition cut;
    StageRule evolution;
    TerminalRule terminal;
    OutcomeLabeler label; // empty: canonical_label
    int max_stages = 16;
    SolverConfig solver;
    OptConfig mixing; // representation search for ensemble initial states
};

// "M=1,T=0" style label of the dominant basis ket.
std::string canonical_label(const PureState& s);

std::string outcome_label(const Scenario& sc, const PureState& s);

struct Trajectory {
    std::vector<ReductionEvent> events;
    PureState final_state;
    double total_probability = 1.0;
    std::string terminal_label;
};

// evolve -> instant -> jump until the terminal rule fires or sigma stays zero.
// Throws StageOverflow when max_stages jumps leave a non-terminal state.
Trajectory run_trajectory(const Scenario& sc, Rng& rng);

// The instant of stage `stage` evolved from `state`, exactly as the cascade solves it.
ReductionInstant stage_instant(const Scenario& sc, const PureState& state, int stage);

using OutcomeDistribution = std::map<std::string, double>;

struct OutcomePath {
    std::string label;
    double probability = 1.0;
    std::vector<double> jump_probabilities;
    std::vector<double> t_red; // per stage, from the start of that stage
    std::vector<InstantKind> kinds;
    PureState final_state;

    std::size_t reductions() const { return jump_probabilities.size(); }
};

// Depth-first expansion of every jump branch.
std::vector<OutcomePath> enumerate_paths(const Scenario& sc);
OutcomeDistribution enumerate_outcomes(const Scenario& sc);
OutcomeDistribution to_distribution(const std::vector<OutcomePath>& paths);

struct JumpRecord {
    int stage = 0;
    double t_red = 0.0;
    double t_abs = 0.0;
    InstantKind kind = InstantKind::None;
    std::size_t outcome_index = 0;
    double probability = 1.0;
    std::string outcome_label;
};

struct TrajectoryRecord {
    std::vector<JumpRecord> jumps;
    double total_probability = 1.0;
    std::string terminal_label;
};

struct EnsembleResult {
    OutcomeDistribution distribution; // empirical frequencies
    std::vector<TrajectoryRecord> records; // by trajectory index
};

// n_traj trajectories, trajectory i seeded with derive_seed(seed, i). threads = 0 picks
// the hardware concurrency, capped by REDUXION_THREADS. Results do not depend on the
// thread count.
EnsembleResult run_ensemble(const Scenario& sc, std::size_t n_traj, std::uint64_t seed, unsigned threads = 0);

unsigned default_thread_count();

} // namespace reduxion
