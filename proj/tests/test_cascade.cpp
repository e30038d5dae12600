#include "reduxion/cascade.hpp"
#include "reduxion/error.hpp"
#include "reduxion/evolution.hpp"
#include "reduxion/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace reduxion;

namespace {

double weight_of(const OutcomeDistribution& d, const std::string& label) {
    const auto it = d.find(label);
    return it == d.end() ? 0.0 : it->second;
}

std::size_t max_reductions(const std::vector<OutcomePath>& paths) {
    std::size_t n = 0;
    for (const auto& p : paths) n = std::max(n, p.reductions());
    return n;
}

} // namespace

TEST_CASE("tourmaline above one half reduces once") {
    const Scenario sc = build_tourmaline({0.6, 1.0});
    CHECK(max_reductions(enumerate_paths(sc)) == 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        CHECK(run_trajectory(sc, rng).events.size() == 1);
    }
}

TEST_CASE("tourmaline reduction count follows the binary bracket") {
    // n with 2^-n <= c < 2^-(n-1)
    for (double c : {0.45, 0.3, 0.2, 0.1, 0.05, 0.02}) {
        const int n = static_cast<int>(std::ceil(-std::log2(c)));
        const auto paths = enumerate_paths(build_tourmaline({c, 1.0}));
        CHECK(max_reductions(paths) == static_cast<std::size_t>(n));
        CHECK(weight_of(to_distribution(paths), "pass") == doctest::Approx(c).epsilon(1e-9));
    }
}

TEST_CASE("path probability is the product of its jumps") {
    for (const auto& v : scenario_variants()) {
        const auto paths = enumerate_paths(build_scenario(v.name, {}));
        double total = 0.0;
        for (const auto& p : paths) {
            double prod = 1.0;
            for (double w : p.jump_probabilities) prod *= w;
            CHECK(p.probability == doctest::Approx(prod).epsilon(1e-12));
            CHECK(p.t_red.size() == p.reductions());
            CHECK(p.kinds.size() == p.reductions());
            total += p.probability;
        }
        INFO(v.name);
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("emission survival halves per stage") {
    for (int n = 1; n <= 6; ++n)
        CHECK(weight_of(enumerate_outcomes(build_emission({1.0, n})), "excited") ==
              doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-9));
}

TEST_CASE("trajectory bookkeeping") {
    const Scenario sc = build_emission({2.0, 5});
    Rng rng(3);
    const auto tr = run_trajectory(sc, rng);
    REQUIRE(!tr.events.empty());
    double t = 0.0, prob = 1.0;
    for (std::size_t i = 0; i < tr.events.size(); ++i) {
        const auto& ev = tr.events[i];
        CHECK(ev.stage == static_cast<int>(i) + 1);
        t += ev.t_red;
        prob *= ev.probability;
        CHECK(ev.t_abs == doctest::Approx(t).epsilon(1e-12));
        CHECK(ev.t_red == doctest::Approx(2.0 * std::numbers::ln2).epsilon(1e-9));
        CHECK(ev.kind == InstantKind::HalfCrossing);
    }
    CHECK(tr.total_probability == doctest::Approx(prob).epsilon(1e-12));
    CHECK((tr.terminal_label == "emitted" || tr.terminal_label == "excited"));
}

TEST_CASE("stage overflow") {
    Scenario sc = build_emission({1.0, 10});
    sc.max_stages = 3;
    auto overflow = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind() == ErrorKind::StageOverflow;
        }
        return false;
    };
    CHECK(overflow([&] { (void)enumerate_paths(sc); }));
    CHECK(overflow([&] { (void)run_ensemble(sc, 200, 1); }));
}

TEST_CASE("single-trajectory ensemble is a point mass") {
    const auto res = run_ensemble(build_tourmaline({0.3, 1.0}), 1, 42);
    REQUIRE(res.distribution.size() == 1);
    CHECK(res.distribution.begin()->second == 1.0);
    CHECK(res.records.size() == 1);
    CHECK_THROWS_AS(run_ensemble(build_tourmaline({0.3, 1.0}), 0, 42), Error);
}

TEST_CASE("ensembles are reproducible and thread-count independent") {
    const Scenario sc = build_detection({3, {}, {}, 3});
    const auto a = run_ensemble(sc, 3000, 7, 1);
    const auto b = run_ensemble(sc, 3000, 7, 4);
    const auto c = run_ensemble(sc, 3000, 8, 4);
    CHECK(a.distribution == b.distribution);
    REQUIRE(a.records.size() == b.records.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        same = same && a.records[i].terminal_label == b.records[i].terminal_label &&
               a.records[i].jumps.size() == b.records[i].jumps.size();
        differs = differs || a.records[i].terminal_label != c.records[i].terminal_label;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("trajectory i uses derive_seed(seed, i)") {
    const Scenario sc = build_tourmaline({0.05, 1.0});
    const auto res = run_ensemble(sc, 50, 99, 3);
    for (std::size_t i = 0; i < 50; ++i) {
        Rng rng(derive_seed(99, i));
        const auto tr = run_trajectory(sc, rng);
        CHECK(tr.terminal_label == res.records[i].terminal_label);
        CHECK(tr.events.size() == res.records[i].jumps.size());
    }
}

TEST_CASE("detection frequencies at 1e5 trajectories") {
    const Scenario sc = build_detection({3, {}, {}, 3});
    const std::size_t n = 100000;
    const auto res = run_ensemble(sc, n, 2024);
    const double want = (1.0 - std::pow(0.25, 3)) / 3.0;
    const double sd = std::sqrt(want * (1.0 - want) / n);
    for (int s = 1; s <= 3; ++s) CHECK(std::abs(weight_of(res.distribution, "detector_" + std::to_string(s)) - want) < 4 * sd);
    const double w0 = std::pow(0.25, 3);
    CHECK(std::abs(weight_of(res.distribution, "undetected") - w0) < 4 * std::sqrt(w0 * (1 - w0) / n));
}

TEST_CASE("mixed initial state cascades from its best representation") {
    // the Rabi coupling is unitary on the whole truncated space, so mixed representations evolve cleanly
    Scenario sc = build_nonintegral({0.5, 1.0, 6, 3});
    const System& s = sc.system;
    sc.initial = Ensemble({{0.6, PureState::basis(s, {1, 0})},
                           {0.4, normalize(PureState(s, {{{1, 1}, 1.0}, {{0, 0}, 1.0}}))}});
    const auto paths = enumerate_paths(sc);
    double total = 0.0;
    for (const auto& p : paths) {
        total += p.probability;
        CHECK(std::abs(p.final_state.norm_squared() - 1.0) < 1e-9);
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
    const auto exact = to_distribution(paths);
    const auto mc = run_ensemble(sc, 20000, 5).distribution;
    double tv = 0.0;
    for (const auto& [k, v] : exact) tv += std::abs(v - weight_of(mc, k));
    for (const auto& [k, v] : mc)
        if (!exact.count(k)) tv += v;
    CHECK(tv / 2 < 0.02);
}
