#pragma once

#include "reduxion/cascade.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace reduxion {

// A photon polarized at angle alpha meets an absorbing crystal; only the parallel
// component couples to the crystal. c_perp_sq = sin^2 alpha.
struct TourmalineParams {
    double c_perp_sq = 0.3;
    double tau = 1.0;
};

// Stage n absorbs with probability cap_n * (1 - e^{-t/tau}), cap_n = 1 - 2^{n-1} p_trans,
// so the transmitted path telescopes to p_trans.
struct AbsorptionParams {
    double p_abs = 0.8;
    double tau = 1.0;
};

struct EmissionParams {
    double tau = 1.0;
    int n_stages = 10;
};

// N emitters/modes; c_sq are the |c_s|^2 (uniform when empty), taus per channel
// (all 1 when empty).
struct DetectionParams {
    int n = 3;
    std::vector<double> c_sq;
    std::vector<double> taus;
    int n_stages = 3;
};

struct SuperpositionParams {
    double cs_sq = 0.7;
    double tau = 1.0;
};

// Two-level atom and one photon mode truncated at `cutoff`, coupled by Rabi rotations
// with frequency omega * sqrt(n + 1) between |Atom1,Mn> and |Atom0,M(n+1)>.
struct NonintegralParams {
    double alpha1_sq = 0.5;
    double omega = 1.0;
    int cutoff = 6;
    int n_stages = 3;
};

// Photon pair entangled across locations a and b, absorbed independently at rates
// lambda_a and lambda_b.
struct EntangledPairParams {
    double c1_sq = 0.5;
    double lambda_a = 1.0;
    double lambda_b = 1.0;
    int n_stages = 3;
};

// Atom entangled with a photon in one of two modes; the photon survives absorption
// with probability e^{-t/tau}.
struct AtomPhotonParams {
    double c1_sq = 0.5;
    double tau = 1.0;
    int n_stages = 3;
};

// in -> out1 + W -> out123 with rates lambda_in, lambda_1.
struct WeakBosonParams {
    double lambda_in = 1.0;
    double lambda_1 = 1.0;
    int n_stages = 3;
};

Scenario build_tourmaline(const TourmalineParams& p);
Scenario build_absorption(const AbsorptionParams& p);
Scenario build_emission(const EmissionParams& p);
Scenario build_detection(const DetectionParams& p);
Scenario build_superposition(const SuperpositionParams& p);
Scenario build_nonintegral(const NonintegralParams& p);
Scenario build_entangled_pair(const EntangledPairParams& p);
Scenario build_atom_photon(const AtomPhotonParams& p);
Scenario build_weak_boson(const WeakBosonParams& p);

// Terminal test shared by the cascades that end in a bare basis ket: the dominant ket
// carries all but 1e-5 of the weight (plateau reductions leave a tiny residual).
bool is_bare(const PureState& s);

// Config-facing registry.

enum class ParamType { Real, Integer, RealList };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Real;
    double lower = 0.0;
    double upper = 0.0;
    bool lower_open = false;
    bool upper_open = false;
    std::optional<std::variant<double, std::vector<double>>> fallback; // none: optional, no default
    std::string doc;
};

struct VariantSpec {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
};

using ParamValue = std::variant<double, std::vector<double>>;
using ParamBlock = std::map<std::string, ParamValue>;

// The nine built-in variants, in a fixed order.
const std::vector<VariantSpec>& scenario_variants();

const VariantSpec* find_variant(const std::string& name);

// Validates `params` against the variant schema (unknown names, types, bounds) and builds
// the scenario. Throws ConfigInvalid on schema violations.
Scenario build_scenario(const std::string& name, const ParamBlock& params);

// "name: type in [lo, hi] (default d)"
std::string describe(const ParamSpec& p);

} // namespace reduxion
