#pragma once

#include "reduxion/state.hpp"

#include <utility>
#include <variant>
#include <vector>

namespace reduxion {

// Amplitude pair (mu_0, mu_1) of a two-outcome restricted evolution.
struct AmplitudePair {
    Amplitude mu0;
    Amplitude mu1;
};

// |mu_0|^2 = exp(-t/tau), |mu_1|^2 = 1 - exp(-t/tau); both real non-negative.
AmplitudePair exp_survival(double tau, double t);

// mu_0 = cos(omega t), mu_1 = -i sin(omega t).
AmplitudePair rabi_pair(double omega, double t);

struct KineticsWeights {
    double w_in = 1.0;
    double w_inter = 0.0; // weak boson present
    double w_out = 0.0;
};

// Closed-form populations of in -> intermediate -> out with rate ratio beta, as a
// function of dimensionless time lambda_in * t. |beta - 1| < 1e-6 uses the beta = 1 limit.
KineticsWeights weak_boson_curves(double beta, double tau);

struct KineticsPeak {
    double tau0 = 1.0;
    double w_inter = 0.0;
};

// Stationary point of the intermediate population and its value.
KineticsPeak weak_boson_peak(double beta);

struct ExponentialSurvival {
    double tau = 1.0;
};

struct RabiPair {
    double omega = 1.0;
};

struct WeakBosonKinetics {
    double lambda_in = 1.0;
    double lambda_1 = 1.0;
};

// Tabulated |mu_i|^2 tuples, linearly interpolated and held constant past the last sample.
struct PiecewiseTable {
    std::vector<double> times;
    std::vector<std::vector<double>> probabilities;
};

// A time-dependent tuple of evolution amplitudes with sum |mu_i|^2 = 1.
class AmplitudeSchedule {
public:
    using Family = std::variant<ExponentialSurvival, RabiPair, WeakBosonKinetics, PiecewiseTable>;

    explicit AmplitudeSchedule(Family family);

    const Family& family() const { return family_; }
    std::size_t arity() const;
    std::vector<Amplitude> operator()(double t) const;

private:
    Family family_;
};

} // namespace reduxion
