#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reduxion {

using Amplitude = std::complex<double>;

// Occupation number per mode, in system order. Ordered lexicographically by std::map.
using Occupations = std::vector<int>;

// Amplitudes with modulus below this are not stored.
inline constexpr double kDropThreshold = 1e-14;

enum class ModeKind { GaugeBoson, Matter };

struct ModeSpec {
    std::string label;
    ModeKind kind = ModeKind::Matter;
    int dimension = 1; // occupation cutoff + 1 for boson modes, level count for matter

    bool operator==(const ModeSpec&) const = default;
};

inline ModeSpec gauge_mode(std::string label, int dimension = 2) {
    return {std::move(label), ModeKind::GaugeBoson, dimension};
}

inline ModeSpec matter_mode(std::string label, int dimension = 2) {
    return {std::move(label), ModeKind::Matter, dimension};
}

// Immutable ordered list of labeled modes. Copies share storage.
class System {
public:
    System();
    explicit System(std::vector<ModeSpec> modes);
    System(std::initializer_list<ModeSpec> modes);

    std::span<const ModeSpec> modes() const { return *modes_; }
    std::size_t size() const { return modes_->size(); }
    const ModeSpec& mode(std::size_t i) const { return (*modes_)[i]; }
    std::optional<std::size_t> index_of(std::string_view label) const;
    std::size_t index_or_throw(std::string_view label) const;

    // Product of mode dimensions.
    std::size_t dimension() const;

    bool contains(const Occupations& occ) const;

    // "M=1,T=0"
    std::string format(const Occupations& occ) const;

    bool operator==(const System& other) const;

private:
    std::shared_ptr<const std::vector<ModeSpec>> modes_;
};

// Concatenation of two systems; throws DuplicateModeLabel on overlap.
System concat(const System& a, const System& b);

class PureState {
public:
    using AmplitudeMap = std::map<Occupations, Amplitude>;

    PureState() = default;
    PureState(System system, AmplitudeMap amplitudes);

    static PureState basis(System system, Occupations occ, Amplitude amp = 1.0);

    const System& system() const { return system_; }
    const AmplitudeMap& amplitudes() const { return amps_; }
    Amplitude amplitude(const Occupations& occ) const;
    std::size_t support_size() const { return amps_.size(); }

    double norm_squared() const;
    double norm() const;

    PureState scaled(Amplitude factor) const;

    // Label of the largest-modulus amplitude; lexicographically smallest among near-ties.
    Occupations dominant_label() const;
    // |amplitude|^2 / norm^2 of the dominant label.
    double dominant_weight() const;

    // Same modes, reordered to match `target`.
    PureState reordered(const System& target) const;

private:
    System system_;
    AmplitudeMap amps_;
};

// Accumulates amplitudes on a fixed system, for linear maps defined on basis kets.
class StateBuilder {
public:
    explicit StateBuilder(System system) : system_(std::move(system)) {}

    void add(const Occupations& occ, Amplitude amp);
    PureState build() &&;

private:
    System system_;
    PureState::AmplitudeMap amps_;
};

PureState tensor(const PureState& a, const PureState& b);

// <a|b>
Amplitude inner(const PureState& a, const PureState& b);

PureState normalize(const PureState& s);

PureState add(const PureState& a, const PureState& b);

struct EnsembleMember {
    double weight = 0.0;
    PureState state;
};

class Ensemble {
public:
    Ensemble() = default;
    explicit Ensemble(std::vector<EnsembleMember> members);

    std::span<const EnsembleMember> members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    const System& system() const { return members_.front().state.system(); }

private:
    std::vector<EnsembleMember> members_;
};

} // namespace reduxion
