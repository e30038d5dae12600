#include "reduxion/scenarios.hpp"

#include "reduxion/error.hpp"
#include "reduxion/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace reduxion {

namespace {

using KetMap = std::function<void(const Occupations&, Amplitude, StateBuilder&)>;

PureState evolve(const PureState& s, const KetMap& f) {
    StateBuilder b(s.system());
    for (const auto& [occ, amp] : s.amplitudes()) f(occ, amp, b);
    return std::move(b).build();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidParameter, what);
}

Occupations with(Occupations occ, std::size_t i, int v) {
    occ[i] = v;
    return occ;
}

} // namespace

bool is_bare(const PureState& s) {
    return s.dominant_weight() >= 1.0 - 1e-5;
}

Scenario build_tourmaline(const TourmalineParams& p) {
    require(p.c_perp_sq > 0.0 && p.c_perp_sq < 1.0, "tourmaline: c_perp_sq must lie in (0, 1)");
    require(p.tau > 0.0, "tourmaline: tau must be positive");
    Scenario sc;
    sc.name = "tourmaline";
    sc.system = System{gauge_mode("Mperp"), gauge_mode("Mpar"), matter_mode("T")};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState(sc.system, {{{1, 0, 0}, std::sqrt(p.c_perp_sq)}, {{0, 1, 0}, std::sqrt(1.0 - p.c_perp_sq)}});
    const double tau = p.tau;
    // only |Mpar1,T0> couples; the same law applies at every stage
    sc.evolution = [tau](const PureState& s, int) {
        return StageFlow{[s, tau](double t) {
                             const auto [m0, m1] = exp_survival(tau, t);
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 if (o[1] == 1 && o[2] == 0) {
                                     b.add(o, a * m0);
                                     b.add({o[0], 0, 1}, a * m1);
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         40.0 * tau};
    };
    sc.terminal = [](const PureState& s, int) { return is_bare(s); };
    sc.label = [](const PureState& s) {
        const auto d = s.dominant_label();
        if (d[2] == 1) return std::string("absorb");
        if (d[0] == 1) return std::string("pass");
        return canonical_label(s);
    };
    sc.max_stages = 60;
    return sc;
}

namespace {

double absorption_cap(double p_trans, int stage) {
    return std::clamp(1.0 - std::ldexp(p_trans, stage - 1), 0.0, 1.0);
}

} // namespace

Scenario build_absorption(const AbsorptionParams& p) {
    require(p.p_abs > 0.0 && p.p_abs < 1.0, "absorption: p_abs must lie in (0, 1)");
    require(p.tau > 0.0, "absorption: tau must be positive");
    Scenario sc;
    sc.name = "absorption";
    sc.system = System{gauge_mode("M"), matter_mode("A")};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState::basis(sc.system, {1, 0});
    const double tau = p.tau;
    const double p_trans = 1.0 - p.p_abs;
    sc.evolution = [tau, p_trans](const PureState& s, int stage) {
        const double cap = absorption_cap(p_trans, stage);
        return StageFlow{[s, tau, cap](double t) {
                             const double q = cap * -std::expm1(-t / tau);
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 if (o == Occupations{1, 0}) {
                                     b.add(o, a * std::sqrt(1.0 - q));
                                     b.add({0, 1}, a * std::sqrt(q));
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         40.0 * tau};
    };
    // the photon leaves once a stage saturated at its cap instead of crossing 1/2
    sc.terminal = [p_trans](const PureState& s, int done) {
        if (s.dominant_label()[1] == 1) return true;
        return done >= 1 && absorption_cap(p_trans, done) <= 0.5;
    };
    sc.label = [](const PureState& s) {
        return std::string(s.dominant_label()[1] == 1 ? "absorbed" : "transmitted");
    };
    sc.max_stages = 60;
    return sc;
}

Scenario build_emission(const EmissionParams& p) {
    require(p.tau > 0.0, "emission: tau must be positive");
    require(p.n_stages >= 1, "emission: n_stages must be at least 1");
    Scenario sc;
    sc.name = "emission";
    sc.system = System{gauge_mode("M"), matter_mode("Atom")};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState::basis(sc.system, {0, 1});
    const double tau = p.tau;
    sc.evolution = [tau](const PureState& s, int) {
        return StageFlow{[s, tau](double t) {
                             const auto [m0, m1] = exp_survival(tau, t);
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 if (o == Occupations{0, 1}) {
                                     b.add(o, a * m0);
                                     b.add({1, 0}, a * m1);
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         40.0 * tau};
    };
    const int n = p.n_stages;
    sc.terminal = [n](const PureState& s, int done) { return s.dominant_label()[0] == 1 || done >= n; };
    sc.label = [](const PureState& s) {
        return std::string(s.dominant_label()[0] == 1 ? "emitted" : "excited");
    };
    sc.max_stages = n;
    return sc;
}

Scenario build_detection(const DetectionParams& p) {
    require(p.n >= 1 && p.n <= 24, "detection: n must lie in [1, 24]");
    require(p.n_stages >= 1, "detection: n_stages must be at least 1");
    const auto N = static_cast<std::size_t>(p.n);
    std::vector<double> c_sq = p.c_sq.empty() ? std::vector<double>(N, 1.0 / p.n) : p.c_sq;
    std::vector<double> taus = p.taus.empty() ? std::vector<double>(N, 1.0) : p.taus;
    require(c_sq.size() == N, "detection: c_sq needs one entry per channel");
    require(taus.size() == N, "detection: taus needs one entry per channel");
    double total = 0.0;
    for (double c : c_sq) {
        require(c > 0.0, "detection: channel weights must be positive");
        total += c;
    }
    require(std::abs(total - 1.0) < 1e-10, "detection: channel weights must sum to 1");
    for (double t : taus) require(t > 0.0, "detection: taus must be positive");

    std::vector<ModeSpec> modes;
    for (std::size_t s = 1; s <= N; ++s) modes.push_back(gauge_mode("M_" + std::to_string(s)));
    // DP level 2(s-1)+1: particle at detector s, excited; 2(s-1): detector s has emitted
    modes.push_back(matter_mode("DP", 2 * p.n));
    Scenario sc;
    sc.name = "detection";
    sc.system = System(std::move(modes));
    sc.cut = gauge_cut(sc.system);
    StateBuilder init(sc.system);
    for (std::size_t s = 0; s < N; ++s) {
        Occupations o(N + 1, 0);
        o[N] = static_cast<int>(2 * s + 1);
        init.add(o, std::sqrt(c_sq[s]));
    }
    sc.initial = std::move(init).build();

    const double horizon = 40.0 * *std::max_element(taus.begin(), taus.end());
    sc.evolution = [taus, N, horizon](const PureState& s, int) {
        return StageFlow{[s, taus, N](double t) {
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 const int dp = o[N];
                                 const auto ch = static_cast<std::size_t>(dp / 2);
                                 const bool dark = std::all_of(o.begin(), o.begin() + static_cast<long>(N),
                                                               [](int v) { return v == 0; });
                                 if (dark && dp % 2 == 1) {
                                     const auto [m0, m1] = exp_survival(taus[ch], t);
                                     b.add(o, a * m0);
                                     b.add(with(with(o, ch, 1), N, dp - 1), a * m1);
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         horizon};
    };
    const int n_stages = p.n_stages;
    auto fired = [N](const PureState& s) -> int {
        const auto d = s.dominant_label();
        for (std::size_t i = 0; i < N; ++i)
            if (d[i] == 1) return static_cast<int>(i) + 1;
        return 0;
    };
    sc.terminal = [fired, n_stages](const PureState& s, int done) { return fired(s) > 0 || done >= n_stages; };
    sc.label = [fired](const PureState& s) {
        const int f = fired(s);
        return f > 0 ? "detector_" + std::to_string(f) : std::string("undetected");
    };
    sc.max_stages = n_stages;
    return sc;
}

Scenario build_superposition(const SuperpositionParams& p) {
    require(p.cs_sq > 0.0 && p.cs_sq < 1.0, "superposition: cs_sq must lie in (0, 1)");
    require(p.tau > 0.0, "superposition: tau must be positive");
    Scenario sc;
    sc.name = "superposition";
    // PS levels: 0 = particle with the system in s-bar, 1 = particle with the system in s,
    // 2 = particle absorbed by the system in s
    sc.system = System{gauge_mode("M"), matter_mode("PS", 3)};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState(sc.system, {{{0, 0}, std::sqrt(1.0 - p.cs_sq)}, {{0, 1}, std::sqrt(p.cs_sq)}});
    const double tau = p.tau;
    sc.evolution = [tau](const PureState& s, int) {
        return StageFlow{[s, tau](double t) {
                             const auto [m0, m1] = exp_survival(tau, t);
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 if (o == Occupations{0, 1}) {
                                     b.add(o, a * m0);
                                     b.add({1, 2}, a * m1);
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         40.0 * tau};
    };
    sc.terminal = [](const PureState& s, int) { return is_bare(s); };
    sc.label = [](const PureState& s) { return std::string(s.dominant_label()[1] == 2 ? "s" : "sbar"); };
    sc.max_stages = 60;
    return sc;
}

Scenario build_nonintegral(const NonintegralParams& p) {
    require(p.alpha1_sq >= 0.0 && p.alpha1_sq <= 1.0, "nonintegral: alpha1_sq must lie in [0, 1]");
    require(p.omega > 0.0, "nonintegral: omega must be positive");
    require(p.n_stages >= 1, "nonintegral: n_stages must be at least 1");
    if (p.cutoff < p.n_stages)
        throw Error(ErrorKind::CutoffTooSmall, "nonintegral: fock cutoff " + std::to_string(p.cutoff) +
                                                   " below n_stages " + std::to_string(p.n_stages));
    Scenario sc;
    sc.name = "nonintegral";
    sc.system = System{matter_mode("Atom"), gauge_mode("M", p.cutoff + 1)};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState(sc.system, {{{0, 0}, std::sqrt(1.0 - p.alpha1_sq)}, {{1, 0}, std::sqrt(p.alpha1_sq)}});
    const double omega = p.omega;
    const int cutoff = p.cutoff;
    sc.evolution = [omega, cutoff](const PureState& s, int) {
        return StageFlow{[s, omega, cutoff](double t) {
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 const int atom = o[0], n = o[1];
                                 if (atom == 1 && n < cutoff) {
                                     const auto [m0, m1] = rabi_pair(omega * std::sqrt(n + 1.0), t);
                                     b.add(o, a * m0);
                                     b.add({0, n + 1}, a * m1);
                                 } else if (atom == 0 && n >= 1) {
                                     const auto [m0, m1] = rabi_pair(omega * std::sqrt(static_cast<double>(n)), t);
                                     b.add(o, a * m0);
                                     b.add({1, n - 1}, a * m1);
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         2.0 * std::numbers::pi / omega};
    };
    const int n_stages = p.n_stages;
    sc.terminal = [n_stages](const PureState&, int done) { return done >= n_stages; };
    sc.max_stages = n_stages;
    return sc;
}

Scenario build_entangled_pair(const EntangledPairParams& p) {
    require(p.c1_sq > 0.0 && p.c1_sq < 1.0, "entangled_pair: c1_sq must lie in (0, 1)");
    require(p.lambda_a >= 0.0 && p.lambda_b >= 0.0, "entangled_pair: rates must be non-negative");
    require(p.n_stages >= 1, "entangled_pair: n_stages must be at least 1");
    Scenario sc;
    sc.name = "entangled_pair";
    // Ra / Rb record which photon (1 or 2) was absorbed at each location, 0 for none
    sc.system = System{gauge_mode("Ma1"), gauge_mode("Ma2"), gauge_mode("Mb1"), gauge_mode("Mb2"),
                       matter_mode("Ra", 3), matter_mode("Rb", 3)};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState(sc.system, {{{1, 0, 0, 1, 0, 0}, std::sqrt(p.c1_sq)},
                                       {{0, 1, 1, 0, 0, 0}, std::sqrt(1.0 - p.c1_sq)}});
    const double la = p.lambda_a, lb = p.lambda_b;
    const double slowest = std::min(la > 0.0 ? la : lb, lb > 0.0 ? lb : la);
    const double horizon = slowest > 0.0 ? 40.0 / slowest : 1.0;
    sc.evolution = [la, lb, horizon](const PureState& s, int) {
        return StageFlow{[s, la, lb](double t) {
                             // photon at a site survives with e^{-lambda t}, else lands in that site's R
                             const double sa = std::exp(-la * t), sb = std::exp(-lb * t);
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 std::vector<std::pair<Occupations, Amplitude>> kets{{o, a}};
                                 auto site = [&](std::size_t first, std::size_t reservoir, double survive) {
                                     std::vector<std::pair<Occupations, Amplitude>> next;
                                     for (const auto& [k, amp] : kets) {
                                         const std::size_t l = k[first] == 1 ? 1 : (k[first + 1] == 1 ? 2 : 0);
                                         if (l == 0) {
                                             next.emplace_back(k, amp);
                                             continue;
                                         }
                                         next.emplace_back(k, amp * std::sqrt(survive));
                                         Occupations gone = with(k, first + l - 1, 0);
                                         gone[reservoir] = static_cast<int>(l);
                                         next.emplace_back(gone, amp * std::sqrt(1.0 - survive));
                                     }
                                     kets = std::move(next);
                                 };
                                 site(0, 4, sa);
                                 site(2, 5, sb);
                                 for (const auto& [k, amp] : kets) b.add(k, amp);
                             });
                         },
                         horizon};
    };
    auto photons = [](const PureState& s) {
        const auto d = s.dominant_label();
        return std::pair<bool, bool>{d[0] + d[1] > 0, d[2] + d[3] > 0};
    };
    const int n_stages = p.n_stages;
    sc.terminal = [photons, n_stages](const PureState& s, int done) {
        const auto [a, b] = photons(s);
        return (!a && !b) || done >= n_stages;
    };
    sc.label = [photons](const PureState& s) {
        const auto [a, b] = photons(s);
        if (a && b) return std::string("pair");
        if (a) return std::string("a_only");
        if (b) return std::string("b_only");
        return std::string("both_absorbed");
    };
    sc.max_stages = n_stages;
    return sc;
}

Scenario build_atom_photon(const AtomPhotonParams& p) {
    require(p.c1_sq > 0.0 && p.c1_sq <= 1.0, "atom_photon: c1_sq must lie in (0, 1]");
    require(p.tau > 0.0, "atom_photon: tau must be positive");
    require(p.n_stages >= 1, "atom_photon: n_stages must be at least 1");
    Scenario sc;
    sc.name = "atom_photon";
    // Atom level l-1 pairs with photon mode M_l; R level l records absorption from M_l
    sc.system = System{gauge_mode("M1"), gauge_mode("M2"), matter_mode("Atom"), matter_mode("R", 3)};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState(sc.system, {{{1, 0, 0, 0}, std::sqrt(p.c1_sq)}, {{0, 1, 1, 0}, std::sqrt(1.0 - p.c1_sq)}});
    const double tau = p.tau;
    sc.evolution = [tau](const PureState& s, int) {
        return StageFlow{[s, tau](double t) {
                             const auto [keep, absorbed] = exp_survival(tau, t);
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 const int l = o[0] == 1 ? 1 : (o[1] == 1 ? 2 : 0);
                                 if (l > 0 && o[3] == 0) {
                                     b.add(o, a * keep);
                                     b.add({0, 0, o[2], l}, a * absorbed);
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         40.0 * tau};
    };
    auto photon = [](const PureState& s) {
        const auto d = s.dominant_label();
        return d[0] == 1 ? 1 : (d[1] == 1 ? 2 : 0);
    };
    const int n_stages = p.n_stages;
    sc.terminal = [photon, n_stages](const PureState& s, int done) { return photon(s) == 0 || done >= n_stages; };
    sc.label = [photon](const PureState& s) {
        const int l = photon(s);
        return l == 0 ? std::string("absorbed") : "photon_" + std::to_string(l);
    };
    sc.max_stages = n_stages;
    return sc;
}

Scenario build_weak_boson(const WeakBosonParams& p) {
    require(p.lambda_in > 0.0, "weak_boson: lambda_in must be positive");
    require(p.lambda_1 > 0.0, "weak_boson: lambda_1 must be positive");
    require(p.n_stages >= 1, "weak_boson: n_stages must be at least 1");
    Scenario sc;
    sc.name = "weak_boson";
    // P levels: 0 = in, 1 = out_1 (with the boson), 1 + k = out_123 produced in stage k.
    // Fresh out levels per stage keep the map unitary on superpositions of in and out.
    sc.system = System{matter_mode("P", 2 + p.n_stages), gauge_mode("W")};
    sc.cut = gauge_cut(sc.system);
    sc.initial = PureState::basis(sc.system, {0, 0});
    const double lin = p.lambda_in, l1 = p.lambda_1;
    const double beta = l1 / lin;
    const double tau0 = weak_boson_peak(beta).tau0;
    sc.evolution = [lin, l1, beta, tau0](const PureState& s, int stage) {
        const bool boson = s.amplitude({1, 1}) != Amplitude(0.0);
        const double horizon = boson ? 10.0 / l1 : std::max(10.0, 4.0 * tau0) / lin;
        return StageFlow{[s, lin, l1, beta, stage](double t) {
                             return evolve(s, [&](const Occupations& o, Amplitude a, StateBuilder& b) {
                                 if (o == Occupations{0, 0}) {
                                     const auto w = weak_boson_curves(beta, lin * t);
                                     b.add(o, a * std::sqrt(w.w_in));
                                     b.add({1, 1}, a * std::sqrt(w.w_inter));
                                     b.add({1 + stage, 0}, a * std::sqrt(w.w_out));
                                 } else if (o == Occupations{1, 1}) {
                                     const double keep = std::exp(-l1 * t);
                                     b.add(o, a * std::sqrt(keep));
                                     b.add({1 + stage, 0}, a * std::sqrt(-std::expm1(-l1 * t)));
                                 } else {
                                     b.add(o, a);
                                 }
                             });
                         },
                         horizon};
    };
    const int n_stages = p.n_stages;
    sc.terminal = [n_stages](const PureState& s, int done) {
        const bool live = s.amplitude({0, 0}) != Amplitude(0.0) || s.amplitude({1, 1}) != Amplitude(0.0);
        return !live || done >= n_stages;
    };
    sc.label = [](const PureState& s) { return std::string(s.dominant_label()[1] == 1 ? "boson" : "no_boson"); };
    sc.max_stages = n_stages;
    return sc;
}

// ---------------------------------------------------------------------------
// registry

namespace {

ParamSpec real(std::string name, double lo, double hi, bool lo_open, bool hi_open, std::optional<double> def,
               std::string doc) {
    ParamSpec p;
    p.name = std::move(name);
    p.type = ParamType::Real;
    p.lower = lo;
    p.upper = hi;
    p.lower_open = lo_open;
    p.upper_open = hi_open;
    if (def) p.fallback = *def;
    p.doc = std::move(doc);
    return p;
}

ParamSpec integer(std::string name, double lo, double hi, double def, std::string doc) {
    ParamSpec p = real(std::move(name), lo, hi, false, false, def, std::move(doc));
    p.type = ParamType::Integer;
    return p;
}

ParamSpec real_list(std::string name, double lo, double hi, bool lo_open, std::string doc) {
    ParamSpec p = real(std::move(name), lo, hi, lo_open, false, std::nullopt, std::move(doc));
    p.type = ParamType::RealList;
    p.fallback = std::vector<double>{};
    return p;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<VariantSpec> make_variants() {
    const double half_pi = std::numbers::pi / 2.0;
    return {
        {"tourmaline", "photon through an absorbing crystal; outcomes pass / absorb",
         {real("c_perp_sq", 0, 1, true, true, 0.3, "probability of the non-absorbed polarization"),
          real("alpha", 0, half_pi, true, true, std::nullopt, "polarization angle; sets c_perp_sq = sin^2 alpha"),
          real("tau", 0, kInf, true, true, 1.0, "absorption time")}},
        {"absorption", "staged absorption / transmission; outcomes absorbed / transmitted",
         {real("p_abs", 0, 1, true, true, 0.8, "absorption factor"),
          real("tau", 0, kInf, true, true, 1.0, "absorption time")}},
        {"emission", "spontaneous emission of an excited atom; outcomes emitted / excited",
         {real("tau", 0, kInf, true, true, 1.0, "lifetime"),
          integer("n_stages", 1, 200, 10, "stages before the survivor is reported as excited")}},
        {"detection", "particle detection by N emitters; outcomes detector_s / undetected",
         {integer("n", 1, 24, 3, "number of channels"),
          real_list("c_sq", 0, 1, true, "channel probabilities |c_s|^2 (default uniform)"),
          real_list("taus", 0, kInf, true, "channel lifetimes (default 1)"),
          integer("n_stages", 1, 200, 3, "stages before the particle is reported undetected")}},
        {"superposition", "superposition reduced by an emitting particle; outcomes s / sbar",
         {real("cs_sq", 0, 1, true, true, 0.7, "probability |c_s|^2 of the coupled component"),
          real("tau", 0, kInf, true, true, 1.0, "emission time")}},
        {"nonintegral", "atom and one photon mode with Rabi coupling; canonical ket labels",
         {real("alpha1_sq", 0, 1, false, false, 0.5, "initial excited-state probability"),
          real("omega", 0, kInf, true, true, 1.0, "single-photon Rabi frequency"),
          integer("cutoff", 1, 64, 6, "photon-number cutoff"),
          integer("n_stages", 1, 64, 3, "number of reductions")}},
        {"entangled_pair", "entangled photon pair absorbed at two locations; outcomes pair / a_only / b_only / both_absorbed",
         {real("c1_sq", 0, 1, true, true, 0.5, "probability |c_1|^2"),
          real("lambda_a", 0, kInf, false, true, 1.0, "absorption rate at a"),
          real("lambda_b", 0, kInf, false, true, 1.0, "absorption rate at b"),
          integer("n_stages", 1, 200, 3, "stages before the remaining photons are reported")}},
        {"atom_photon", "atom-photon entanglement reduced by absorption; outcomes absorbed / photon_1 / photon_2",
         {real("c1_sq", 0, 1, true, false, 0.5, "probability |c_1|^2"),
          real("tau", 0, kInf, true, true, 1.0, "absorption time"),
          integer("n_stages", 1, 200, 3, "stages before the photon is reported")}},
        {"weak_boson", "process with an intermediate weak boson; outcomes boson / no_boson",
         {real("lambda_in", 0, kInf, true, true, 1.0, "rate of in -> intermediate"),
          real("lambda_1", 0, kInf, true, true, 1.0, "boson decay rate"),
          integer("n_stages", 1, 200, 3, "number of stages")}},
    };
}

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorKind::ConfigInvalid, what);
}

bool in_bounds(const ParamSpec& p, double v) {
    if (!std::isfinite(v)) return false;
    if (p.lower_open ? !(v > p.lower) : !(v >= p.lower)) return false;
    if (p.upper_open ? !(v < p.upper) : !(v <= p.upper)) return false;
    return true;
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct Resolved {
    std::map<std::string, ParamValue> values;
    std::map<std::string, bool> given;

    double real(const std::string& k) const { return std::get<double>(values.at(k)); }
    int integer(const std::string& k) const { return static_cast<int>(std::get<double>(values.at(k))); }
    std::vector<double> list(const std::string& k) const { return std::get<std::vector<double>>(values.at(k)); }
    bool has(const std::string& k) const { return values.count(k) > 0; }
};

Resolved resolve(const VariantSpec& v, const ParamBlock& params) {
    Resolved r;
    for (const auto& [key, value] : params) {
        auto it = std::find_if(v.params.begin(), v.params.end(), [&](const ParamSpec& p) { return p.name == key; });
        if (it == v.params.end()) invalid("scenario '" + v.name + "' has no parameter '" + key + "'");
        const ParamSpec& spec = *it;
        if (spec.type == ParamType::RealList) {
            const auto* list = std::get_if<std::vector<double>>(&value);
            if (!list) invalid("parameter '" + key + "' must be a list of numbers");
            for (double x : *list)
                if (!in_bounds(spec, x)) invalid("parameter '" + key + "' entry " + fmt(x) + " out of range");
        } else {
            const auto* x = std::get_if<double>(&value);
            if (!x) invalid("parameter '" + key + "' must be a number");
            if (spec.type == ParamType::Integer && *x != std::floor(*x))
                invalid("parameter '" + key + "' must be an integer");
            if (!in_bounds(spec, *x)) invalid("parameter '" + key + "' = " + fmt(*x) + " out of range; " + describe(spec));
        }
        r.values[key] = value;
        r.given[key] = true;
    }
    for (const auto& spec : v.params)
        if (!r.has(spec.name) && spec.fallback) r.values[spec.name] = *spec.fallback;
    return r;
}

} // namespace

const std::vector<VariantSpec>& scenario_variants() {
    static const std::vector<VariantSpec> variants = make_variants();
    return variants;
}

const VariantSpec* find_variant(const std::string& name) {
    for (const auto& v : scenario_variants())
        if (v.name == name) return &v;
    return nullptr;
}

std::string describe(const ParamSpec& p) {
    std::string out = p.name + ": ";
    out += p.type == ParamType::Real ? "real" : p.type == ParamType::Integer ? "integer" : "list of reals";
    out += " in " + std::string(p.lower_open ? "(" : "[") + fmt(p.lower) + ", " + fmt(p.upper) +
           (p.upper_open ? ")" : "]");
    if (p.fallback) {
        if (const auto* d = std::get_if<double>(&*p.fallback))
            out += " (default " + fmt(*d) + ")";
        else
            out += " (default: see description)";
    } else {
        out += " (optional)";
    }
    return out;
}

Scenario build_scenario(const std::string& name, const ParamBlock& params) {
    const VariantSpec* v = find_variant(name);
    if (!v) invalid("unknown scenario '" + name + "'");
    const Resolved r = resolve(*v, params);
    try {
        if (name == "tourmaline") {
            if (r.given.count("alpha") && r.given.count("c_perp_sq"))
                invalid("tourmaline: give either alpha or c_perp_sq, not both");
            TourmalineParams p;
            p.c_perp_sq = r.has("alpha") ? std::pow(std::sin(r.real("alpha")), 2) : r.real("c_perp_sq");
            p.tau = r.real("tau");
            return build_tourmaline(p);
        }
        if (name == "absorption") return build_absorption({r.real("p_abs"), r.real("tau")});
        if (name == "emission") return build_emission({r.real("tau"), r.integer("n_stages")});
        if (name == "detection")
            return build_detection({r.integer("n"), r.list("c_sq"), r.list("taus"), r.integer("n_stages")});
        if (name == "superposition") return build_superposition({r.real("cs_sq"), r.real("tau")});
        if (name == "nonintegral")
            return build_nonintegral({r.real("alpha1_sq"), r.real("omega"), r.integer("cutoff"), r.integer("n_stages")});
        if (name == "entangled_pair")
            return build_entangled_pair(
                {r.real("c1_sq"), r.real("lambda_a"), r.real("lambda_b"), r.integer("n_stages")});
        if (name == "atom_photon") return build_atom_photon({r.real("c1_sq"), r.real("tau"), r.integer("n_stages")});
        return build_weak_boson({r.real("lambda_in"), r.real("lambda_1"), r.integer("n_stages")});
    } catch (const Error& e) {
        // cross-parameter checks surface as config errors; CutoffTooSmall keeps its kind
        if (e.kind() == ErrorKind::InvalidParameter) invalid(e.what());
        throw;
    }
}

} // namespace reduxion
