#include "reduxion/reduction.hpp"

#include "reduxion/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace reduxion {

double reduction_entropy(std::span<const double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw Error(ErrorKind::BadDistribution, "negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-8) throw Error(ErrorKind::BadDistribution, "weights do not sum to 1");
    double s = 0.0;
    for (double w : weights)
        if (w > 0.0) s -= w * std::log(w);
    return s;
}

const char* to_string(InstantKind kind) noexcept {
    switch (kind) {
    case InstantKind::HalfCrossing: return "HalfCrossing";
    case InstantKind::StationaryWeights: return "StationaryWeights";
    case InstantKind::Plateau: return "Plateau";
    case InstantKind::None: return "None";
    }
    return "?";
}

namespace {

// sigma below this on the whole window counts as no entanglement
constexpr double kSigmaFloor = 1e-12;
// grid decreases smaller than this are treated as rounding, not descent
constexpr double kDescentNoise = 1e-13;

ReductionInstant finish(const WeightTrace& trace, double t, bool plateau) {
    ReductionInstant out;
    out.t_red = t;
    out.weights_at = trace(t);
    out.sigma_at = reduction_entropy(out.weights_at);
    if (plateau)
        out.kind = InstantKind::Plateau;
    else if (out.weights_at.size() == 2 && std::abs(out.weights_at[0] - 0.5) < 1e-6)
        out.kind = InstantKind::HalfCrossing;
    else
        out.kind = InstantKind::StationaryWeights;
    return out;
}

} // namespace

ReductionInstant find_entropy_maximum(const WeightTrace& trace, double t_start, double horizon,
                                      const SolverConfig& solver) {
    if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidParameter, "solver horizon must be positive");
    if (solver.grid_points < 4 || solver.max_iter < 1 || !(solver.t_tol_rel > 0.0) ||
        !(solver.plateau_eps > 0.0) || !(solver.derivative_step_rel > 0.0))
        throw Error(ErrorKind::InvalidParameter, "invalid solver configuration");

    const int n = solver.grid_points;
    const double h = horizon / n;
    const double t_end = t_start + horizon;
    const double t_tol = solver.t_tol_rel * horizon;
    auto grid_t = [&](int i) { return i == n ? t_end : t_start + i * h; };
    auto sigma = [&](double t) { return reduction_entropy(trace(t)); };

    std::vector<double> sig(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) sig[static_cast<std::size_t>(i)] = sigma(grid_t(i));
    auto S = [&](int i) { return sig[static_cast<std::size_t>(i)]; };

    if (*std::max_element(sig.begin(), sig.end()) < kSigmaFloor) {
        ReductionInstant out;
        out.t_red = t_start;
        out.kind = InstantKind::None;
        out.weights_at = trace(t_start);
        out.sigma_at = S(0);
        return out;
    }

    // first grid descent after the running maximum
    double run_max = S(0);
    int k = 0;
    bool descent = false;
    for (int i = 1; i <= n; ++i) {
        if (S(i) > run_max) {
            run_max = S(i);
            k = i;
        } else if (S(i) < run_max - kDescentNoise) {
            descent = true;
            break;
        }
    }

    // bisection for the first t with sup - sigma(t) < eps, between grid points p-1 and p
    auto plateau_entry = [&](int p, double sup) {
        if (p == 0) return finish(trace, t_start, true);
        double lo = grid_t(p - 1), hi = grid_t(p);
        int iter = 0;
        while (hi - lo > t_tol) {
            if (++iter > solver.max_iter) throw Error(ErrorKind::NonConvergent, "plateau bisection did not converge");
            const double mid = 0.5 * (lo + hi);
            (sup - sigma(mid) < solver.plateau_eps ? hi : lo) = mid;
        }
        return finish(trace, hi, true);
    };
    auto first_in_band = [&](int upto, double sup) {
        int p = 0;
        while (p < upto && !(sup - S(p) < solver.plateau_eps)) ++p;
        return p;
    };

    if (!descent) {
        const int p = first_in_band(n, run_max);
        if (grid_t(p) > t_start + 0.95 * horizon)
            throw Error(ErrorKind::NonConvergent, "entropy still rising at the end of the solver window");
        return plateau_entry(p, run_max);
    }

    if (k == 0) return finish(trace, t_start, false);
    const int p = first_in_band(k, run_max);
    if (p <= k - 2) return plateau_entry(p, run_max);

    // stationary point in [t_{k-1}, t_{k+1}]: bisect on the sign of d sigma/dt
    double a = grid_t(k - 1), b = grid_t(k + 1);
    const double hd = std::min(solver.derivative_step_rel * horizon, 0.25 * h);
    auto slope = [&](double t) {
        const double tp = std::min(t + hd, t_end);
        const double tm = std::max(t - hd, t_start);
        return (sigma(tp) - sigma(tm)) / (tp - tm);
    };
    if (slope(a) > 0.0 && slope(b) < 0.0) {
        int iter = 0;
        while (b - a > t_tol) {
            if (++iter > solver.max_iter) throw Error(ErrorKind::NonConvergent, "stationary-point bisection did not converge");
            const double mid = 0.5 * (a + b);
            (slope(mid) > 0.0 ? a : b) = mid;
        }
        return finish(trace, 0.5 * (a + b), false);
    }

    // kinked maximum (no clean sign change): golden-section search on sigma itself
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = sigma(x1), f2 = sigma(x2);
    for (int iter = 0; b - a > t_tol && iter < solver.max_iter; ++iter) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sigma(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sigma(x2);
        }
    }
    return finish(trace, 0.5 * (a + b), false);
}

ReductionInstant find_reduction_instant(const std::function<SchmidtDecomposition(double)>& traj,
                                        double t_start, double horizon, const SolverConfig& solver) {
    return find_entropy_maximum([&](double t) { return schmidt_weights(traj(t)); }, t_start, horizon, solver);
}

ReductionInstant find_reduction_instant(const StateFlow& flow, const Bipartition& cut, double t_start,
                                        double horizon, const SolverConfig& solver) {
    return find_entropy_maximum([&](double t) { return schmidt_spectrum(flow(t), cut); }, t_start, horizon,
                                solver);
}

std::size_t pick_outcome(std::span<const double> weights, double u) {
    if (weights.empty()) throw Error(ErrorKind::BadDistribution, "no outcomes to pick from");
    double total = 0.0;
    for (double v : weights) total += v;
    const double x = u * total;
    std::size_t j = 0;
    double acc = weights[0];
    while (j + 1 < weights.size() && x >= acc) acc += weights[++j];
    return j;
}

ReductionEvent sample_jump(const SchmidtDecomposition& d, double t_red, Rng& rng) {
    if (d.rank() == 0) throw Error(ErrorKind::ZeroState, "empty decomposition");
    const auto w = schmidt_weights(d);
    const std::size_t j = pick_outcome(w, rng.uniform());

    ReductionEvent ev;
    ev.t_red = t_red;
    ev.t_abs = t_red;
    ev.outcome_index = j;
    ev.probability = w[j];
    ev.post_state = normalize(d.branch(j));
    return ev;
}

std::vector<Branch> enumerate_jump(const SchmidtDecomposition& d) {
    std::vector<Branch> out;
    out.reserve(d.rank());
    for (std::size_t j = 0; j < d.rank(); ++j) {
        const double c = d.terms()[j].coefficient;
        out.push_back({c * c, normalize(d.branch(j))});
    }
    return out;
}

std::vector<Branch> reduce_ensemble(const Ensemble& e, const Bipartition& cut) {
    std::vector<Branch> out;
    for (const auto& m : e.members())
        for (auto& b : enumerate_jump(schmidt_decompose(m.state, cut)))
            out.push_back({m.weight * b.probability, std::move(b.state)});
    return out;
}

std::vector<double> mixed_reduction_spectrum(const Ensemble& e, const Bipartition& cut) {
    // rho_red = sum_i |v_i><v_i| with v_i = sqrt(p_k w_kj) |kj>; its nonzero spectrum is
    // that of the Gram matrix G_il = <v_i|v_l>
    std::vector<PureState> v;
    for (const auto& b : reduce_ensemble(e, cut)) v.push_back(b.state.scaled(std::sqrt(b.probability)));
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXcd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index l = i; l < n; ++l) {
            G(i, l) = inner(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(l)]);
            G(l, i) = std::conj(G(i, l));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    std::vector<double> lambda;
    for (Eigen::Index i = n - 1; i >= 0; --i) lambda.push_back(std::max(0.0, es.eigenvalues()(i)));
    return lambda;
}

double mixed_reduction_entropy(const Ensemble& e, const Bipartition& cut) {
    double s = 0.0;
    for (double l : mixed_reduction_spectrum(e, cut))
        if (l > 0.0) s -= l * std::log(l);
    return s;
}

Ensemble mix_representation(const Ensemble& e, double theta, double phi) {
    if (e.size() != 2) throw Error(ErrorKind::UnsupportedEnsembleSize, "representation mixing needs two members");
    const auto& m = e.members();
    const PureState a = m[0].state.scaled(std::sqrt(m[0].weight));
    const PureState b = m[1].state.scaled(std::sqrt(m[1].weight));
    const double c = std::cos(theta), s = std::sin(theta);
    const Amplitude ph = std::polar(1.0, phi);
    const PureState u = add(a.scaled(c), b.scaled(ph * s));
    const PureState w = add(a.scaled(-std::conj(ph) * s), b.scaled(c));

    std::vector<EnsembleMember> out;
    for (const PureState* x : {&u, &w}) {
        const double p = x->norm_squared();
        if (p > 1e-14) out.push_back({p, normalize(*x)});
    }
    double total = 0.0;
    for (const auto& mem : out) total += mem.weight;
    for (auto& mem : out) mem.weight /= total;
    return Ensemble(std::move(out));
}

RepresentationResult maximize_representation_entropy(const Ensemble& e, const Bipartition& cut,
                                                      const OptConfig& opt) {
    if (e.size() == 1) return {e, mixed_reduction_entropy(e, cut), 0.0, 0.0};
    if (e.size() != 2) throw Error(ErrorKind::UnsupportedEnsembleSize, "representation search needs two members");
    if (opt.theta_points < 1 || opt.phi_points < 1 || opt.starts < 1 || !(opt.step_tol > 0.0))
        throw Error(ErrorKind::InvalidParameter, "invalid optimizer configuration");

    constexpr double half_pi = std::numbers::pi / 2.0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](double th, double ph) { return mixed_reduction_entropy(mix_representation(e, th, ph), cut); };

    struct Point {
        double sigma, theta, phi;
    };
    std::vector<Point> grid;
    for (int i = 0; i <= opt.theta_points; ++i)
        for (int j = 0; j < opt.phi_points; ++j) {
            const double th = half_pi * i / opt.theta_points;
            const double ph = two_pi * j / opt.phi_points;
            grid.push_back({f(th, ph), th, ph});
        }
    std::stable_sort(grid.begin(), grid.end(), [](const Point& x, const Point& y) { return x.sigma > y.sigma; });

    // compass search from the best grid points; theta clamped to [0, pi/2], phi periodic
    Point best = grid.front();
    const std::size_t starts = std::min<std::size_t>(static_cast<std::size_t>(opt.starts), grid.size());
    for (std::size_t s = 0; s < starts; ++s) {
        Point cur = grid[s];
        double dth = half_pi / opt.theta_points, dph = two_pi / opt.phi_points;
        while (std::max(dth, dph) > opt.step_tol) {
            bool moved = false;
            const double moves[4][2] = {{dth, 0.0}, {-dth, 0.0}, {0.0, dph}, {0.0, -dph}};
            for (const auto& mv : moves) {
                const double th = std::clamp(cur.theta + mv[0], 0.0, half_pi);
                const double ph = std::fmod(cur.phi + mv[1] + two_pi, two_pi);
                const double v = f(th, ph);
                if (v > cur.sigma + 1e-15) {
                    cur = {v, th, ph};
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                dth *= 0.5;
                dph *= 0.5;
            }
        }
        if (cur.sigma > best.sigma) best = cur;
    }
    return {mix_representation(e, best.theta, best.phi), best.sigma, best.theta, best.phi};
}

} // namespace reduxion
