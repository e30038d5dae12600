#include "reduxion/evolution.hpp"

#include "reduxion/error.hpp"

#include <algorithm>
#include <cmath>

namespace reduxion {

AmplitudePair exp_survival(double tau, double t) {
    if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveTau, "exponential survival needs tau > 0");
    if (t < 0.0) throw Error(ErrorKind::InvalidParameter, "exponential survival evaluated at t < 0");
    const double survive = std::exp(-t / tau);
    const double decayed = -std::expm1(-t / tau);
    return {std::sqrt(survive), std::sqrt(decayed)};
}

AmplitudePair rabi_pair(double omega, double t) {
    if (!(omega > 0.0)) throw Error(ErrorKind::InvalidParameter, "Rabi frequency must be positive");
    return {std::cos(omega * t), Amplitude(0.0, -std::sin(omega * t))};
}

KineticsWeights weak_boson_curves(double beta, double tau) {
    if (!(beta > 0.0)) throw Error(ErrorKind::NonPositiveBeta, "rate ratio beta must be positive");
    if (tau < 0.0) throw Error(ErrorKind::InvalidParameter, "kinetics evaluated at tau < 0");
    KineticsWeights w;
    w.w_in = std::exp(-tau);
    const double d = beta - 1.0;
    if (std::abs(d) < 1e-6)
        w.w_inter = tau * std::exp(-tau);
    else
        w.w_inter = std::exp(-tau) * (-std::expm1(-d * tau)) / d;
    w.w_out = std::max(0.0, 1.0 - w.w_in - w.w_inter);
    return w;
}

KineticsPeak weak_boson_peak(double beta) {
    if (!(beta > 0.0)) throw Error(ErrorKind::NonPositiveBeta, "rate ratio beta must be positive");
    const double d = beta - 1.0;
    if (std::abs(d) < 1e-6) return {1.0, std::exp(-1.0)};
    const double tau0 = std::log1p(d) / d;
    return {tau0, std::exp(-tau0) / beta};
}

namespace {

void validate(const PiecewiseTable& table) {
    if (table.times.empty() || table.times.size() != table.probabilities.size())
        throw Error(ErrorKind::InvalidParameter, "piecewise table needs matching, non-empty samples");
    const std::size_t arity = table.probabilities.front().size();
    for (std::size_t i = 0; i < table.times.size(); ++i) {
        if (i > 0 && !(table.times[i] > table.times[i - 1]))
            throw Error(ErrorKind::InvalidParameter, "piecewise table times must increase");
        const auto& p = table.probabilities[i];
        if (p.size() != arity) throw Error(ErrorKind::InvalidParameter, "piecewise table arity varies");
        double sum = 0.0;
        for (double v : p) {
            if (v < 0.0) throw Error(ErrorKind::InvalidParameter, "piecewise table has a negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw Error(ErrorKind::InvalidParameter, "piecewise table sample does not sum to 1");
    }
}

} // namespace

AmplitudeSchedule::AmplitudeSchedule(Family family) : family_(std::move(family)) {
    if (auto* e = std::get_if<ExponentialSurvival>(&family_); e && !(e->tau > 0.0))
        throw Error(ErrorKind::NonPositiveTau, "exponential survival needs tau > 0");
    if (auto* r = std::get_if<RabiPair>(&family_); r && !(r->omega > 0.0))
        throw Error(ErrorKind::InvalidParameter, "Rabi frequency must be positive");
    if (auto* k = std::get_if<WeakBosonKinetics>(&family_); k && !(k->lambda_in > 0.0 && k->lambda_1 > 0.0))
        throw Error(ErrorKind::NonPositiveBeta, "kinetics rates must be positive");
    if (auto* p = std::get_if<PiecewiseTable>(&family_)) validate(*p);
}

std::size_t AmplitudeSchedule::arity() const {
    if (std::holds_alternative<WeakBosonKinetics>(family_)) return 3;
    if (auto* p = std::get_if<PiecewiseTable>(&family_)) return p->probabilities.front().size();
    return 2;
}

std::vector<Amplitude> AmplitudeSchedule::operator()(double t) const {
    if (auto* e = std::get_if<ExponentialSurvival>(&family_)) {
        auto [m0, m1] = exp_survival(e->tau, t);
        return {m0, m1};
    }
    if (auto* r = std::get_if<RabiPair>(&family_)) {
        auto [m0, m1] = rabi_pair(r->omega, t);
        return {m0, m1};
    }
    if (auto* k = std::get_if<WeakBosonKinetics>(&family_)) {
        auto w = weak_boson_curves(k->lambda_1 / k->lambda_in, k->lambda_in * t);
        return {std::sqrt(w.w_in), std::sqrt(w.w_inter), std::sqrt(w.w_out)};
    }
    const auto& table = std::get<PiecewiseTable>(family_);
    const auto& ts = table.times;
    std::vector<double> p;
    if (t <= ts.front()) {
        p = table.probabilities.front();
    } else if (t >= ts.back()) {
        p = table.probabilities.back();
    } else {
        const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
        const std::size_t lo = hi - 1;
        const double f = (t - ts[lo]) / (ts[hi] - ts[lo]);
        p.resize(table.probabilities[lo].size());
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = (1.0 - f) * table.probabilities[lo][i] + f * table.probabilities[hi][i];
    }
    std::vector<Amplitude> out;
    out.reserve(p.size());
    for (double v : p) out.emplace_back(std::sqrt(v));
    return out;
}

} // namespace reduxion
