#include "reduxion/cascade.hpp"

#include "reduxion/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

namespace reduxion {

std::string canonical_label(const PureState& s) {
    return s.system().format(s.dominant_label());
}

std::string outcome_label(const Scenario& sc, const PureState& s) {
    return sc.label ? sc.label(s) : canonical_label(s);
}

ReductionInstant stage_instant(const Scenario& sc, const PureState& state, int stage) {
    const StageFlow f = sc.evolution(state, stage);
    return find_reduction_instant(f.flow, sc.cut, 0.0, f.horizon, sc.solver);
}

namespace {

// One node per reachable post-jump state. Children are expanded at most once and then
// shared by every walker; the expansion is a deterministic function of the node state,
// so caching it does not change any sampled or enumerated result.
struct Node {
    std::variant<PureState, Ensemble> state;
    int depth = 0; // completed stages
    double t_abs = 0.0;

    std::once_flag once;
    bool leaf = false;
    std::string label; // leaf label, or label of the state itself
    double t_red = 0.0;
    InstantKind kind = InstantKind::None;
    std::vector<double> probabilities;
    std::vector<std::size_t> children;
};

class OutcomeTree {
public:
    explicit OutcomeTree(const Scenario& sc) : sc_(sc) {
        if (!sc.evolution) throw Error(ErrorKind::InvalidParameter, "scenario has no evolution rule");
        if (sc.max_stages < 1) throw Error(ErrorKind::InvalidParameter, "max_stages must be positive");
        add(sc.initial, 0, 0.0);
    }

    const Node& expand(std::size_t i) {
        Node& n = node(i);
        std::call_once(n.once, [&] { expand_now(i, n); });
        return n;
    }

    const Node& node_at(std::size_t i) { return node(i); }
    const Scenario& scenario() const { return sc_; }

private:
    Node& node(std::size_t i) {
        std::lock_guard lock(mu_);
        return nodes_[i];
    }

    std::size_t add(std::variant<PureState, Ensemble> state, int depth, double t_abs) {
        std::lock_guard lock(mu_);
        Node& n = nodes_.emplace_back();
        n.state = std::move(state);
        n.depth = depth;
        n.t_abs = t_abs;
        return nodes_.size() - 1;
    }

    void expand_now(std::size_t, Node& n) {
        if (auto* e = std::get_if<Ensemble>(&n.state)) {
            expand_mixed(n, *e);
            return;
        }
        const PureState& s = std::get<PureState>(n.state);
        n.label = outcome_label(sc_, s);
        if (sc_.terminal && sc_.terminal(s, n.depth)) {
            n.leaf = true;
            return;
        }
        if (n.depth >= sc_.max_stages)
            throw Error(ErrorKind::StageOverflow, "scenario '" + sc_.name + "' not terminal after " +
                                                      std::to_string(sc_.max_stages) + " stages");
        const StageFlow stage = sc_.evolution(s, n.depth + 1);
        const ReductionInstant inst = find_reduction_instant(stage.flow, sc_.cut, 0.0, stage.horizon, sc_.solver);
        if (inst.kind == InstantKind::None) {
            n.leaf = true;
            return;
        }
        n.t_red = inst.t_red;
        n.kind = inst.kind;
        const auto branches = enumerate_jump(schmidt_decompose(stage.flow(inst.t_red), sc_.cut));
        for (const auto& b : branches) {
            n.probabilities.push_back(b.probability);
            n.children.push_back(add(b.state, n.depth + 1, n.t_abs + inst.t_red));
        }
    }

    // First stage of a mixed initial state: the representation is fixed by maximizing the
    // mixed reduction entropy, members evolve independently, and the instant maximizes the
    // entropy of the evolved mixture.
    void expand_mixed(Node& n, const Ensemble& e) {
        n.label = "mixed";
        const Ensemble rep = maximize_representation_entropy(e, sc_.cut, sc_.mixing).representation;
        std::vector<StageFlow> flows;
        double horizon = 0.0;
        for (const auto& m : rep.members()) {
            flows.push_back(sc_.evolution(m.state, 1));
            horizon = std::max(horizon, flows.back().horizon);
        }
        auto evolved = [&](double t) {
            std::vector<EnsembleMember> members;
            for (std::size_t k = 0; k < flows.size(); ++k)
                members.push_back({rep.members()[k].weight, flows[k].flow(t)});
            return Ensemble(std::move(members));
        };
        const ReductionInstant inst = find_entropy_maximum(
            [&](double t) { return mixed_reduction_spectrum(evolved(t), sc_.cut); }, 0.0, horizon, sc_.solver);
        n.t_red = inst.t_red;
        n.kind = inst.kind == InstantKind::None ? InstantKind::StationaryWeights : inst.kind;
        for (const auto& b : reduce_ensemble(evolved(inst.t_red), sc_.cut)) {
            n.probabilities.push_back(b.probability);
            n.children.push_back(add(b.state, 1, inst.t_red));
        }
    }

    const Scenario& sc_;
    std::mutex mu_;
    std::deque<Node> nodes_;
};

const PureState& pure(const Node& n) {
    return std::get<PureState>(n.state);
}

struct Walk {
    std::vector<std::size_t> path; // visited nodes
    std::vector<std::size_t> picks;
};

Walk walk(OutcomeTree& tree, Rng& rng) {
    Walk w;
    std::size_t i = 0;
    while (true) {
        w.path.push_back(i);
        const Node& n = tree.expand(i);
        if (n.leaf) return w;
        const std::size_t j = pick_outcome(n.probabilities, rng.uniform());
        w.picks.push_back(j);
        i = n.children[j];
    }
}

TrajectoryRecord to_record(OutcomeTree& tree, const Walk& w) {
    TrajectoryRecord r;
    for (std::size_t s = 0; s < w.picks.size(); ++s) {
        const Node& n = tree.node_at(w.path[s]);
        const Node& child = tree.expand(w.path[s + 1]);
        JumpRecord j;
        j.stage = static_cast<int>(s) + 1;
        j.t_red = n.t_red;
        j.t_abs = child.t_abs;
        j.kind = n.kind;
        j.outcome_index = w.picks[s];
        j.probability = n.probabilities[w.picks[s]];
        j.outcome_label = child.label;
        r.total_probability *= j.probability;
        r.jumps.push_back(std::move(j));
    }
    r.terminal_label = tree.node_at(w.path.back()).label;
    return r;
}

} // namespace

Trajectory run_trajectory(const Scenario& sc, Rng& rng) {
    OutcomeTree tree(sc);
    const Walk w = walk(tree, rng);
    const TrajectoryRecord r = to_record(tree, w);
    Trajectory t;
    for (std::size_t s = 0; s < r.jumps.size(); ++s) {
        const auto& j = r.jumps[s];
        ReductionEvent ev;
        ev.stage = j.stage;
        ev.t_red = j.t_red;
        ev.t_abs = j.t_abs;
        ev.kind = j.kind;
        ev.outcome_index = j.outcome_index;
        ev.probability = j.probability;
        ev.post_state = pure(tree.node_at(w.path[s + 1]));
        ev.outcome_label = j.outcome_label;
        t.events.push_back(std::move(ev));
    }
    const Node& last = tree.node_at(w.path.back());
    if (auto* s = std::get_if<PureState>(&last.state)) t.final_state = *s;
    t.total_probability = r.total_probability;
    t.terminal_label = r.terminal_label;
    return t;
}

std::vector<OutcomePath> enumerate_paths(const Scenario& sc) {
    OutcomeTree tree(sc);
    std::vector<OutcomePath> out;
    OutcomePath cur;
    auto dfs = [&](auto&& self, std::size_t i) -> void {
        const Node& n = tree.expand(i);
        if (n.leaf) {
            OutcomePath p = cur;
            p.label = n.label;
            p.final_state = pure(n);
            out.push_back(std::move(p));
            return;
        }
        for (std::size_t j = 0; j < n.children.size(); ++j) {
            const double saved = cur.probability;
            cur.probability *= n.probabilities[j];
            cur.jump_probabilities.push_back(n.probabilities[j]);
            cur.t_red.push_back(n.t_red);
            cur.kinds.push_back(n.kind);
            self(self, n.children[j]);
            cur.kinds.pop_back();
            cur.t_red.pop_back();
            cur.jump_probabilities.pop_back();
            cur.probability = saved;
        }
    };
    dfs(dfs, 0);
    return out;
}

OutcomeDistribution to_distribution(const std::vector<OutcomePath>& paths) {
    OutcomeDistribution d;
    for (const auto& p : paths) d[p.label] += p.probability;
    return d;
}

OutcomeDistribution enumerate_outcomes(const Scenario& sc) {
    return to_distribution(enumerate_paths(sc));
}

unsigned default_thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REDUXION_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

EnsembleResult run_ensemble(const Scenario& sc, std::size_t n_traj, std::uint64_t seed, unsigned threads) {
    if (n_traj < 1) throw Error(ErrorKind::InvalidParameter, "n_traj must be at least 1");
    OutcomeTree tree(sc);
    EnsembleResult res;
    res.records.resize(n_traj);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < n_traj; i = next++) {
                Rng rng(derive_seed(seed, i));
                res.records[i] = to_record(tree, walk(tree, rng));
            }
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = n_traj;
        }
    };
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_traj));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& r : res.records) res.distribution[r.terminal_label] += 1.0;
    for (auto& [label, w] : res.distribution) w /= static_cast<double>(n_traj);
    return res;
}

} // namespace reduxion
