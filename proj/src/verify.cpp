#include "reduxion/verify.hpp"

#include "reduxion/cascade.hpp"
#include "reduxion/evolution.hpp"
#include "reduxion/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

namespace reduxion {

VerifyRow make_row(std::string group, std::string name, double expected, double actual, double tolerance,
                   bool relative) {
    VerifyRow r{std::move(group), std::move(name), expected, actual, tolerance, relative, false};
    const double err = std::abs(actual - expected) / (relative ? std::abs(expected) : 1.0);
    r.pass = std::isfinite(actual) && err <= tolerance;
    return r;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double weight_of(const OutcomeDistribution& d, const std::string& label) {
    auto it = d.find(label);
    return it == d.end() ? 0.0 : it->second;
}

std::size_t max_reductions(const std::vector<OutcomePath>& paths) {
    std::size_t n = 0;
    for (const auto& p : paths) n = std::max(n, p.reductions());
    return n;
}

void tourmaline_rows(std::vector<VerifyRow>& out) {
    const std::pair<double, int> cases[] = {{0.75, 1}, {0.3, 2}, {0.2, 3}, {0.05, 5}};
    for (auto [c, n] : cases) {
        const auto paths = enumerate_paths(build_tourmaline({c, 1.0}));
        out.push_back(make_row("tourmaline", "W_pass c_perp_sq=" + num(c), c,
                               weight_of(to_distribution(paths), "pass"), 1e-9));
        out.push_back(make_row("tourmaline", "reductions c_perp_sq=" + num(c), n,
                               static_cast<double>(max_reductions(paths)), 0.0));
    }
}

void absorption_rows(std::vector<VerifyRow>& out) {
    for (double p : {0.4, 0.8, 0.97}) {
        const auto paths = enumerate_paths(build_absorption({p, 1.0}));
        out.push_back(make_row("absorption", "W_abs p_abs=" + num(p), p,
                               weight_of(to_distribution(paths), "absorbed"), 1e-9));
        // stages until the cap 1 - 2^{n-1} p_trans drops to 1/2 or below
        int n = 1;
        while (1.0 - std::ldexp(1.0 - p, n - 1) > 0.5) ++n;
        out.push_back(make_row("absorption", "stages p_abs=" + num(p), n,
                               static_cast<double>(max_reductions(paths)), 0.0));
    }
}

void emission_rows(std::vector<VerifyRow>& out) {
    for (double tau : {1.0, 2.5}) {
        const Scenario sc = build_emission({tau, 1});
        const auto inst = stage_instant(sc, std::get<PureState>(sc.initial), 1);
        out.push_back(make_row("emission", "t_red tau=" + num(tau), std::numbers::ln2 * tau, inst.t_red, 1e-6 * tau));
    }
    for (int n = 1; n <= 10; ++n) {
        const auto d = enumerate_outcomes(build_emission({1.0, n}));
        out.push_back(make_row("emission", "survival n=" + std::to_string(n), std::ldexp(1.0, -n),
                               weight_of(d, "excited"), 1e-9));
    }
}

void detection_rows(std::vector<VerifyRow>& out) {
    for (int N : {1, 3, 9}) {
        const Scenario sc = build_detection({N, {}, {}, 2});
        const auto inst = stage_instant(sc, std::get<PureState>(sc.initial), 1);
        double worst = 0.0;
        const double target = 1.0 / (N + 1);
        for (double w : inst.weights_at) worst = std::max(worst, std::abs(w - target));
        if (inst.weights_at.size() != static_cast<std::size_t>(N + 1)) worst = 1.0;
        out.push_back(make_row("detection", "max |w - 1/(N+1)| N=" + std::to_string(N), 0.0, worst, 1e-8));
        const auto d = enumerate_outcomes(sc);
        out.push_back(make_row("detection", "W_0 two stages N=" + std::to_string(N), 1.0 / ((N + 1) * (N + 1)),
                               weight_of(d, "undetected"), 1e-8));
    }
}

void superposition_rows(std::vector<VerifyRow>& out) {
    for (double cs : {0.3, 0.7}) {
        const Scenario sc = build_superposition({cs, 1.0});
        const auto d = enumerate_outcomes(sc);
        out.push_back(make_row("superposition", "W_s cs_sq=" + num(cs), cs, weight_of(d, "s"), 1e-9));
        const auto inst = stage_instant(sc, std::get<PureState>(sc.initial), 1);
        const double mu0_sq = std::exp(-inst.t_red);
        out.push_back(make_row("superposition", "first-instant |mu_0|^2 cs_sq=" + num(cs), cs <= 0.5 ? 0.0 : 1.0 - cs,
                               mu0_sq, 1e-6));
    }
}

void atom_photon_rows(std::vector<VerifyRow>& out) {
    const Scenario sc = build_atom_photon({0.5, 1.0, 3});
    const PureState& init = std::get<PureState>(sc.initial);
    const auto first = stage_instant(sc, init, 1);
    // |mu_0|^2 is the absorbed weight 1 - e^{-t/tau}
    const double sigma0 = std::numbers::ln2;
    out.push_back(make_row("atom_photon", "first-instant |mu_0|^2", 1.0 / (1.0 + std::exp(sigma0)),
                           -std::expm1(-first.t_red), 1e-6));
    const PureState photon1 = PureState::basis(sc.system, {1, 0, 0, 0});
    const auto second = stage_instant(sc, photon1, 2);
    out.push_back(make_row("atom_photon", "second-instant |mu|^2", 0.5, -std::expm1(-second.t_red), 1e-6));
}

void weak_boson_rows(std::vector<VerifyRow>& out) {
    auto first = [](double beta) {
        const Scenario sc = build_weak_boson({1.0, beta, 1});
        return stage_instant(sc, std::get<PureState>(sc.initial), 1);
    };
    // below 1/2 the boson branch is the smaller Schmidt weight
    auto boson_weight = [](const ReductionInstant& inst) {
        return inst.weights_at.size() == 2 ? std::min(inst.weights_at[0], inst.weights_at[1]) : 0.0;
    };
    {
        const auto inst = first(1.0);
        out.push_back(make_row("weak_boson", "tau_red beta=1", 1.0, inst.t_red, 1e-6));
        out.push_back(make_row("weak_boson", "w_1 beta=1", std::exp(-1.0), boson_weight(inst), 1e-9));
    }
    {
        const auto inst = first(0.01);
        out.push_back(make_row("weak_boson", "tau_red beta=0.01 vs ln 2", std::numbers::ln2, inst.t_red, 0.05, true));
    }
    {
        const double beta = 100.0;
        const auto inst = first(beta);
        out.push_back(make_row("weak_boson", "tau_red beta=100", std::log(beta) / (beta - 1.0), inst.t_red, 1e-6));
        out.push_back(make_row("weak_boson", "w_1 beta=100", std::exp(std::log(beta) / (1.0 - beta)) / beta,
                               boson_weight(inst), 1e-9));
    }
    for (double beta : {0.01, 1.0, 100.0}) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto w = weak_boson_curves(beta, 20.0 * i / 999.0);
            worst = std::max(worst, std::abs(w.w_in + w.w_inter + w.w_out - 1.0));
        }
        out.push_back(make_row("weak_boson", "conservation beta=" + num(beta), 0.0, worst, 1e-12));
    }
}

} // namespace

std::vector<VerifyRow> verify_table(const std::string& filter) {
    const std::pair<const char*, void (*)(std::vector<VerifyRow>&)> groups[] = {
        {"tourmaline", tourmaline_rows},       {"absorption", absorption_rows},
        {"emission", emission_rows},           {"detection", detection_rows},
        {"superposition", superposition_rows}, {"atom_photon", atom_photon_rows},
        {"weak_boson", weak_boson_rows},
    };
    std::vector<VerifyRow> out;
    for (const auto& [name, fill] : groups)
        if (std::string(name).find(filter) != std::string::npos) fill(out);
    return out;
}

} // namespace reduxion
