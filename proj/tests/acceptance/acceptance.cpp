// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failed criteria (0 when all pass).

#include "reduxion/cascade.hpp"
#include "reduxion/evolution.hpp"
#include "reduxion/reduction.hpp"
#include "reduxion/scenarios.hpp"
#include "reduxion/schmidt.hpp"

#include "../support.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace reduxion;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kExact = 1e-9;       // enumerated outcome weights
constexpr double kInstant = 1e-6;     // solved reduction instants
constexpr double kDetection = 1e-8;   // detection weights
constexpr double kSigmas = 4.0;       // Monte Carlo deviation bound
constexpr double kConservation = 1e-12;
constexpr double kAdditivity = 1e-10;
constexpr double kResidual = 1e-9;
constexpr double kTv = 0.01;
constexpr double kOracleSigma = 1e-4;
constexpr double kBranchSum = 1e-10;
constexpr std::size_t kTrajectories = 100000;
constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double weight_of(const OutcomeDistribution& d, const std::string& label) {
    const auto it = d.find(label);
    return it == d.end() ? 0.0 : it->second;
}

std::size_t max_reductions(const std::vector<OutcomePath>& paths) {
    std::size_t n = 0;
    for (const auto& p : paths) n = std::max(n, p.reductions());
    return n;
}

ReductionInstant first_instant(const Scenario& sc) {
    return stage_instant(sc, std::get<PureState>(sc.initial), 1);
}

// ---------------------------------------------------------------------------

Verdict tourmaline() {
    Verdict v;
    const auto t0 = Clock::now();
    const std::pair<double, std::size_t> cases[] = {{0.75, 1}, {0.3, 2}, {0.2, 3}, {0.05, 5}};
    double worst = 0.0;
    for (auto [c, n] : cases) {
        const auto paths = enumerate_paths(build_tourmaline({c, 1.0}));
        const double err = std::abs(weight_of(to_distribution(paths), "pass") - c);
        worst = std::max(worst, err);
        v.check(err <= kExact, "W_pass off by " + g(err) + " at " + g(c));
        v.check(max_reductions(paths) == n, std::to_string(max_reductions(paths)) + " reductions at " + g(c));
    }
    const double secs = seconds_since(t0);
    v.check(secs < 1.0, "took " + g(secs) + " s");
    if (v.pass) v.detail = "max |W_pass - c| " + g(worst) + ", reductions 1/2/3/5, " + g(secs) + " s";
    return v;
}

Verdict absorption() {
    Verdict v;
    double worst = 0.0;
    for (double p : {0.4, 0.8, 0.97}) {
        const auto paths = enumerate_paths(build_absorption({p, 1.0}));
        const double err = std::abs(weight_of(to_distribution(paths), "absorbed") - p);
        worst = std::max(worst, err);
        v.check(err <= kExact, "W_0 off by " + g(err) + " at " + g(p));
        const bool multi = max_reductions(paths) > 1;
        v.check(multi == (p > 0.5), "stage count " + std::to_string(max_reductions(paths)) + " at " + g(p));
    }
    if (v.pass) v.detail = "max |W_0 - p_abs| " + g(worst) + ", multi-stage exactly above 1/2";
    return v;
}

Verdict emission() {
    Verdict v;
    const auto t0 = Clock::now();
    for (double tau : {1.0, 2.5}) {
        const double err = std::abs(first_instant(build_emission({tau, 1})).t_red - tau * std::numbers::ln2);
        v.check(err <= kInstant * tau, "t_red off by " + g(err) + " at tau " + g(tau));
    }
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double err = std::abs(weight_of(enumerate_outcomes(build_emission({1.0, n})), "excited") - std::ldexp(1.0, -n));
        worst = std::max(worst, err);
        v.check(err <= kExact, "survival off by " + g(err) + " at n " + std::to_string(n));
    }
    // Monte Carlo: fraction still excited at t_n = n tau ln 2 against e^{-t_n / tau}
    const auto res = run_ensemble(build_emission({1.0, 10}), kTrajectories, kSeed);
    std::vector<std::size_t> alive(11, 0);
    for (const auto& r : res.records) {
        std::size_t n = 0;
        while (n < r.jumps.size() && r.jumps[n].outcome_label == "excited") ++n;
        for (std::size_t k = 0; k <= n; ++k) ++alive[k];
    }
    double worst_z = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double want = std::exp(-n * std::numbers::ln2);
        const double got = static_cast<double>(alive[static_cast<std::size_t>(n)]) / kTrajectories;
        const double z = std::abs(got - want) / std::sqrt(want * (1.0 - want) / kTrajectories);
        worst_z = std::max(worst_z, z);
        v.check(z <= kSigmas, "MC survival " + g(got) + " vs " + g(want) + " at stage " + std::to_string(n));
    }
    const double secs = seconds_since(t0);
    v.check(secs < 30.0, "took " + g(secs) + " s");
    if (v.pass)
        v.detail = "t_red = tau ln 2, max survival err " + g(worst) + ", MC max " + g(worst_z) + " sigma, " + g(secs) + " s";
    return v;
}

Verdict detection() {
    Verdict v;
    double worst = 0.0;
    for (int N : {1, 3, 9}) {
        const Scenario sc = build_detection({N, {}, {}, 2});
        const auto inst = first_instant(sc);
        v.check(inst.weights_at.size() == static_cast<std::size_t>(N + 1), "rank at N " + std::to_string(N));
        for (double w : inst.weights_at) {
            const double err = std::abs(w - 1.0 / (N + 1));
            worst = std::max(worst, err);
            v.check(err <= kDetection, "first-stage weight " + g(w) + " at N " + std::to_string(N));
        }
        const double w0 = weight_of(enumerate_outcomes(sc), "undetected");
        const double err = std::abs(w0 - 1.0 / ((N + 1) * (N + 1)));
        worst = std::max(worst, err);
        v.check(err <= kDetection, "two-stage W_0 " + g(w0) + " at N " + std::to_string(N));
    }
    if (v.pass) v.detail = "max weight error " + g(worst);
    return v;
}

Verdict superposition() {
    Verdict v;
    std::string seen;
    for (double cs : {0.3, 0.7}) {
        const Scenario sc = build_superposition({cs, 1.0});
        const double ws = weight_of(enumerate_outcomes(sc), "s");
        v.check(std::abs(ws - cs) <= kExact, "W_s " + g(ws) + " at " + g(cs));
        const double mu0 = std::exp(-first_instant(sc).t_red);
        const double want = cs <= 0.5 ? 0.0 : 1.0 - cs;
        v.check(std::abs(mu0 - want) <= kInstant, "first-instant |mu_0|^2 = " + g(mu0) + " vs " + g(want) + " at " + g(cs));
        seen += (seen.empty() ? "" : ", ") + g(mu0);
    }
    if (v.pass) v.detail = "W_s exact, first-instant |mu_0|^2 " + seen;
    return v;
}

// sigma(y) = (1 - y) sigma_0 + H(y), maximized by nested grids over y in [0, 1]
double atom_photon_oracle(double sigma0) {
    auto f = [sigma0](double y) {
        auto xl = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
        return (1.0 - y) * sigma0 - xl(y) - xl(1.0 - y);
    };
    double lo = 0.0, hi = 1.0, best = 0.0;
    for (int level = 0; level < 4; ++level) {
        const int n = 1000;
        double best_f = -1.0;
        for (int i = 0; i <= n; ++i) {
            const double y = lo + (hi - lo) * i / n;
            if (f(y) > best_f) best_f = f(y), best = y;
        }
        const double step = (hi - lo) / n;
        lo = std::max(0.0, best - 2 * step);
        hi = std::min(1.0, best + 2 * step);
    }
    return best;
}

Verdict atom_photon() {
    Verdict v;
    const Scenario sc = build_atom_photon({0.5, 1.0, 3});
    const double oracle = atom_photon_oracle(std::numbers::ln2);
    const double first = -std::expm1(-first_instant(sc).t_red);
    v.check(std::abs(first - oracle) <= kInstant, "first instant " + g(first) + " vs oracle " + g(oracle));
    const double second = -std::expm1(-stage_instant(sc, PureState::basis(sc.system, {1, 0, 0, 0}), 2).t_red);
    v.check(std::abs(second - 0.5) <= kInstant, "second instant " + g(second));
    if (v.pass) v.detail = "first " + g(first) + " (oracle " + g(oracle) + "), second " + g(second);
    return v;
}

Verdict weak_boson() {
    Verdict v;
    auto first = [](double beta) { return first_instant(build_weak_boson({1.0, beta, 1})); };
    auto boson = [](const ReductionInstant& i) {
        return i.weights_at.size() == 2 ? std::min(i.weights_at[0], i.weights_at[1]) : 0.0;
    };
    const auto one = first(1.0);
    v.check(std::abs(one.t_red - 1.0) <= kInstant, "beta 1 tau_red " + g(one.t_red));
    v.check(std::abs(boson(one) - std::exp(-1.0)) <= kExact, "beta 1 w_1 " + g(boson(one)));
    const auto slow = first(0.01);
    v.check(std::abs(slow.t_red / std::numbers::ln2 - 1.0) <= 0.05, "beta 0.01 tau_red " + g(slow.t_red));
    const double beta = 100.0, tau0 = std::log(beta) / (beta - 1.0);
    const auto fast = first(beta);
    v.check(std::abs(fast.t_red - tau0) <= kInstant, "beta 100 tau_red " + g(fast.t_red));
    const double w_peak = std::exp(std::log(beta) / (1.0 - beta)) / beta;
    v.check(std::abs(boson(fast) - w_peak) <= kExact, "beta 100 w_1 " + g(boson(fast)));
    double worst = 0.0;
    for (double b : {0.01, 1.0, 100.0})
        for (int i = 0; i < 1000; ++i) {
            const auto w = weak_boson_curves(b, 20.0 * i / 999.0);
            worst = std::max(worst, std::abs(w.w_in + w.w_inter + w.w_out - 1.0));
        }
    v.check(worst <= kConservation, "conservation error " + g(worst));
    if (v.pass)
        v.detail = "tau_red " + g(one.t_red) + " / " + g(slow.t_red) + " / " + g(fast.t_red) + ", conservation " + g(worst);
    return v;
}

// ---------------------------------------------------------------------------

StateFlow emitter(double tau, const std::string& tag) {
    const System s{gauge_mode("M" + tag), matter_mode("A" + tag)};
    return [s, tau](double t) {
        auto [m0, m1] = exp_survival(tau, t);
        return PureState(s, {{{0, 1}, m0}, {{1, 0}, m1}});
    };
}

double sigma_of(const PureState& s) {
    return reduction_entropy(schmidt_spectrum(s, gauge_cut(s.system())));
}

Verdict principles() {
    Verdict v;
    std::mt19937_64 gen(kSeed);

    const System a{gauge_mode("G1"), matter_mode("R1", 3)};
    const System b{gauge_mode("G2", 3), matter_mode("R2", 2)};
    double add_err = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto x = test_support::random_state(a, gen), y = test_support::random_state(b, gen);
        add_err = std::max(add_err, std::abs(sigma_of(tensor(x, y)) - sigma_of(x) - sigma_of(y)));
    }
    v.check(add_err <= kAdditivity, "additivity error " + g(add_err));

    const auto f1 = emitter(1.0, "1"), f2 = emitter(3.0, "2");
    const StateFlow both = [&](double t) { return tensor(f1(t), f2(t)); };
    const double t1 = find_reduction_instant(f1, gauge_cut(f1(0).system()), 0.0, 40.0).t_red;
    const double t2 = find_reduction_instant(f2, gauge_cut(f2(0).system()), 0.0, 120.0).t_red;
    const double t12 = find_reduction_instant(both, gauge_cut(both(0).system()), 0.0, 120.0).t_red;
    v.check(t1 < t12 && t12 < t2, "ordering " + g(t1) + " < " + g(t12) + " < " + g(t2));

    // random states up to dimension 64
    const System shapes[] = {
        System{gauge_mode("G"), matter_mode("R")},
        System{gauge_mode("G", 4), matter_mode("R", 4)},
        System{gauge_mode("G", 3), matter_mode("R1", 2), matter_mode("R2", 5)},
        System{matter_mode("R1", 4), gauge_mode("G1", 4), gauge_mode("G2", 4)},
    };
    double recon = 0.0, ortho = 0.0;
    bool rank_one = true;
    for (int k = 0; k < 200; ++k) {
        const System& sys = shapes[k % 4];
        const auto s = test_support::random_state(sys, gen);
        const auto d = schmidt_decompose(s, gauge_cut(sys));
        const auto r = d.reconstruct();
        double res = 0.0;
        for (const auto& [o, amp] : s.amplitudes()) res += std::norm(amp - r.amplitude(o));
        recon = std::max(recon, std::sqrt(res));
        for (std::size_t i = 0; i < d.rank(); ++i)
            for (std::size_t j = 0; j < d.rank(); ++j) {
                const double want = i == j ? 1.0 : 0.0;
                ortho = std::max(ortho, std::abs(inner(d.terms()[i].gauge, d.terms()[j].gauge) - want));
                ortho = std::max(ortho, std::abs(inner(d.terms()[i].rest, d.terms()[j].rest) - want));
            }
        for (const auto& br : enumerate_jump(d)) rank_one = rank_one && schmidt_spectrum(br.state, gauge_cut(sys)).size() == 1;
    }
    v.check(recon < kResidual, "reconstruction residual " + g(recon));
    v.check(ortho < kResidual, "orthonormality residual " + g(ortho));

    // post-jump states of every built-in cascade
    for (const auto& var : scenario_variants()) {
        const Scenario sc = build_scenario(var.name, {});
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(derive_seed(kSeed, seed));
            for (const auto& ev : run_trajectory(sc, rng).events)
                rank_one = rank_one && schmidt_spectrum(ev.post_state, sc.cut).size() == 1;
        }
    }
    v.check(rank_one, "a post-jump state has Schmidt rank above 1");
    if (v.pass)
        v.detail = "additivity " + g(add_err) + ", " + g(t1) + " < " + g(t12) + " < " + g(t2) + ", residuals " +
                   g(recon) + " / " + g(ortho) + ", post-jump rank 1";
    return v;
}

Verdict oracle_equivalence(Clock::time_point suite_start) {
    Verdict v;
    std::string worst_name;
    double worst = 0.0;
    for (const auto& var : scenario_variants()) {
        const Scenario sc = build_scenario(var.name, {});
        const auto exact = enumerate_outcomes(sc);
        const auto mc = run_ensemble(sc, kTrajectories, kSeed).distribution;
        double tv = 0.0;
        for (const auto& [k, p] : exact) tv += std::abs(p - weight_of(mc, k));
        for (const auto& [k, p] : mc)
            if (!exact.count(k)) tv += p;
        tv /= 2.0;
        if (tv > worst) worst = tv, worst_name = var.name;
        v.check(tv < kTv, var.name + " TV " + g(tv));
    }
    const double secs = seconds_since(suite_start);
    v.check(secs < 120.0, "suite took " + g(secs) + " s");
    if (v.pass) v.detail = "max TV " + g(worst) + " (" + worst_name + "), suite " + g(secs) + " s";
    return v;
}

// Dense evaluation of the mixed reduction entropy on a 2x2 system, written against Eigen
// directly: members are columns psi_k, mixed by the 2x2 unitary, each reshaped and SVD'd.
struct DenseEnsemble {
    Eigen::Vector4cd psi[2];
    double p[2];
};

double dense_sigma(const DenseEnsemble& e, double theta, double phi) {
    const std::complex<double> ph = std::polar(1.0, phi);
    const double c = std::cos(theta), s = std::sin(theta);
    const Eigen::Vector4cd a = std::sqrt(e.p[0]) * e.psi[0], b = std::sqrt(e.p[1]) * e.psi[1];
    const Eigen::Vector4cd u[2] = {c * a + ph * s * b, -std::conj(ph) * s * a + c * b};
    std::vector<Eigen::Vector4cd> branches;
    for (const auto& x : u) {
        if (x.squaredNorm() < 1e-14) continue;
        Eigen::Matrix2cd m;
        m << x(0), x(1), x(2), x(3); // rows: gauge level, cols: rest level
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        for (int j = 0; j < 2; ++j) {
            const double sv = svd.singularValues()(j);
            if (sv <= 1e-10) continue;
            Eigen::Vector4cd v;
            const auto gu = svd.matrixU().col(j);
            const Eigen::Vector2cd rv = svd.matrixV().col(j).conjugate();
            v << gu(0) * rv(0), gu(0) * rv(1), gu(1) * rv(0), gu(1) * rv(1);
            branches.push_back(sv * v);
        }
    }
    const auto n = static_cast<Eigen::Index>(branches.size());
    Eigen::MatrixXcd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gram(i, j) = branches[static_cast<std::size_t>(i)].dot(branches[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    double sigma = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double l = es.eigenvalues()(i);
        if (l > 0.0) sigma -= l * std::log(l);
    }
    return sigma;
}

// Nested grid search: the full 1e-2 grid, then exhaustive windows at 1e-3, 1e-4 and 1e-5
// around the best cells of the previous level. The peaks can be a few 1e-3 wide, so a
// single 1e-3 grid alone can sit 1e-3 below the true maximum.
double grid_oracle(const DenseEnsemble& e) {
    const double half_pi = std::numbers::pi / 2, two_pi = 2 * std::numbers::pi;
    struct Cell {
        double sigma, theta, phi;
    };
    auto by_sigma = [](const Cell& x, const Cell& y) { return x.sigma > y.sigma; };
    std::vector<Cell> cells;
    for (double th = 0.0; th <= half_pi + 1e-12; th += 1e-2)
        for (double ph = 0.0; ph < two_pi; ph += 1e-2) cells.push_back({dense_sigma(e, th, ph), th, ph});

    const struct {
        double step;
        std::size_t keep; // cells of the previous level refined at this step
    } levels[] = {{1e-3, 20}, {1e-4, 5}, {1e-5, 3}};
    for (const auto& lv : levels) {
        const std::size_t keep = std::min(lv.keep, cells.size());
        std::partial_sort(cells.begin(), cells.begin() + static_cast<long>(keep), cells.end(), by_sigma);
        std::vector<Cell> next;
        for (std::size_t k = 0; k < keep; ++k)
            for (int i = -20; i <= 20; ++i)
                for (int j = -20; j <= 20; ++j) {
                    const double th = std::clamp(cells[k].theta + lv.step * i, 0.0, half_pi);
                    const double ph = cells[k].phi + lv.step * j;
                    next.push_back({dense_sigma(e, th, ph), th, ph});
                }
        cells = std::move(next);
    }
    return std::max_element(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.sigma < y.sigma; })->sigma;
}

Eigen::Vector4cd to_dense(const PureState& s) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    for (const auto& [o, a] : s.amplitudes()) v(2 * o[0] + o[1]) = a;
    return v;
}

Verdict mixed_states() {
    Verdict v;
    std::mt19937_64 gen(kSeed + 10);
    const System sys{gauge_mode("G"), matter_mode("R")};
    const auto cut = gauge_cut(sys);
    double sum_err = 0.0, sigma_err = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double p = test_support::uniform(gen, 0.1, 0.9);
        const auto x = test_support::random_state(sys, gen), y = test_support::random_state(sys, gen);
        const Ensemble e({{p, x}, {1.0 - p, y}});
        double total = 0.0;
        for (const auto& b : reduce_ensemble(e, cut)) total += b.probability;
        sum_err = std::max(sum_err, std::abs(total - 1.0));

        const double found = maximize_representation_entropy(e, cut).sigma_max;
        const double oracle = grid_oracle({{to_dense(x), to_dense(y)}, {p, 1.0 - p}});
        sigma_err = std::max(sigma_err, std::abs(found - oracle));
    }
    v.check(sum_err <= kBranchSum, "branch sum error " + g(sum_err));
    v.check(sigma_err <= kOracleSigma, "sigma_max vs grid oracle " + g(sigma_err));
    if (v.pass) v.detail = "branch sum error " + g(sum_err) + ", max |sigma - oracle| " + g(sigma_err);
    return v;
}

} // namespace

int main() {
    const auto start = Clock::now();
    struct Row {
        const char* title;
        std::function<Verdict()> run;
    };
    const Row rows[] = {
        {"tourmaline cascade", tourmaline},
        {"absorption", absorption},
        {"emission", emission},
        {"N-mode detection", detection},
        {"superposition reduction", superposition},
        {"atom-photon entanglement", atom_photon},
        {"weak boson", weak_boson},
        {"principle-level properties", principles},
        {"Monte Carlo vs enumeration", [&] { return oracle_equivalence(start); }},
        {"mixed-state machinery", mixed_states},
    };
    int failed = 0, index = 0;
    for (const auto& row : rows) {
        ++index;
        Verdict v;
        try {
            v = row.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("threw: ") + e.what();
        }
        if (!v.pass) ++failed;
        std::printf("%s  %2d  %-28s %s\n", v.pass ? "PASS" : "FAIL", index, row.title, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria pass in %.1f s\n", index - failed, index, seconds_since(start));
    return failed;
}
