#include "reduxion/state.hpp"

#include "reduxion/error.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace reduxion {

namespace {

const std::shared_ptr<const std::vector<ModeSpec>>& empty_modes() {
    static const auto empty = std::make_shared<const std::vector<ModeSpec>>();
    return empty;
}

} // namespace

System::System() : modes_(empty_modes()) {}

System::System(std::vector<ModeSpec> modes) {
    std::set<std::string> seen;
    for (const auto& m : modes) {
        if (m.dimension < 1)
            throw Error(ErrorKind::InvalidMode, "mode '" + m.label + "' has dimension < 1");
        if (!seen.insert(m.label).second)
            throw Error(ErrorKind::DuplicateModeLabel, "mode label '" + m.label + "' appears twice");
    }
    modes_ = std::make_shared<const std::vector<ModeSpec>>(std::move(modes));
}

System::System(std::initializer_list<ModeSpec> modes) : System(std::vector<ModeSpec>(modes)) {}

std::optional<std::size_t> System::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < modes_->size(); ++i)
        if ((*modes_)[i].label == label) return i;
    return std::nullopt;
}

std::size_t System::index_or_throw(std::string_view label) const {
    auto idx = index_of(label);
    if (!idx) throw Error(ErrorKind::InvalidMode, "no mode labeled '" + std::string(label) + "'");
    return *idx;
}

std::size_t System::dimension() const {
    std::size_t d = 1;
    for (const auto& m : *modes_) d *= static_cast<std::size_t>(m.dimension);
    return d;
}

bool System::contains(const Occupations& occ) const {
    if (occ.size() != modes_->size()) return false;
    for (std::size_t i = 0; i < occ.size(); ++i)
        if (occ[i] < 0 || occ[i] >= (*modes_)[i].dimension) return false;
    return true;
}

std::string System::format(const Occupations& occ) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < occ.size() && i < modes_->size(); ++i) {
        if (i) os << ',';
        os << (*modes_)[i].label << '=' << occ[i];
    }
    return os.str();
}

bool System::operator==(const System& other) const {
    return modes_ == other.modes_ || *modes_ == *other.modes_;
}

System concat(const System& a, const System& b) {
    std::vector<ModeSpec> modes(a.modes().begin(), a.modes().end());
    modes.insert(modes.end(), b.modes().begin(), b.modes().end());
    return System(std::move(modes));
}

PureState::PureState(System system, AmplitudeMap amplitudes) : system_(std::move(system)) {
    for (auto& [occ, amp] : amplitudes) {
        if (!system_.contains(occ))
            throw Error(ErrorKind::InvalidMode, "basis label out of range for system");
        if (std::abs(amp) >= kDropThreshold) amps_.emplace(occ, amp);
    }
}

PureState PureState::basis(System system, Occupations occ, Amplitude amp) {
    AmplitudeMap m;
    m.emplace(std::move(occ), amp);
    return PureState(std::move(system), std::move(m));
}

Amplitude PureState::amplitude(const Occupations& occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? Amplitude{} : it->second;
}

double PureState::norm_squared() const {
    double s = 0.0;
    for (const auto& [occ, amp] : amps_) s += std::norm(amp);
    return s;
}

double PureState::norm() const { return std::sqrt(norm_squared()); }

PureState PureState::scaled(Amplitude factor) const {
    AmplitudeMap m;
    for (const auto& [occ, amp] : amps_) m.emplace(occ, amp * factor);
    return PureState(system_, std::move(m));
}

Occupations PureState::dominant_label() const {
    if (amps_.empty()) return Occupations(system_.size(), 0);
    double best = 0.0;
    for (const auto& [occ, amp] : amps_) best = std::max(best, std::norm(amp));
    // map iteration is lexicographic, so the first near-maximal label wins ties
    for (const auto& [occ, amp] : amps_)
        if (std::norm(amp) >= best - 1e-12 * best) return occ;
    return amps_.begin()->first;
}

double PureState::dominant_weight() const {
    const double n2 = norm_squared();
    if (n2 == 0.0) return 0.0;
    return std::norm(amplitude(dominant_label())) / n2;
}

PureState PureState::reordered(const System& target) const {
    if (target.size() != system_.size())
        throw Error(ErrorKind::SystemMismatch, "reorder target has a different mode count");
    std::vector<std::size_t> source_index(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        auto idx = system_.index_of(target.mode(i).label);
        if (!idx || system_.mode(*idx) != target.mode(i))
            throw Error(ErrorKind::SystemMismatch, "reorder target does not match modes");
        source_index[i] = *idx;
    }
    AmplitudeMap m;
    for (const auto& [occ, amp] : amps_) {
        Occupations out(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) out[i] = occ[source_index[i]];
        m.emplace(std::move(out), amp);
    }
    return PureState(target, std::move(m));
}

void StateBuilder::add(const Occupations& occ, Amplitude amp) {
    if (amp == Amplitude{}) return;
    auto [it, inserted] = amps_.try_emplace(occ, amp);
    if (!inserted) it->second += amp;
}

PureState StateBuilder::build() && { return PureState(std::move(system_), std::move(amps_)); }

PureState tensor(const PureState& a, const PureState& b) {
    System sys = concat(a.system(), b.system());
    PureState::AmplitudeMap m;
    for (const auto& [oa, va] : a.amplitudes()) {
        for (const auto& [ob, vb] : b.amplitudes()) {
            Occupations occ;
            occ.reserve(oa.size() + ob.size());
            occ.insert(occ.end(), oa.begin(), oa.end());
            occ.insert(occ.end(), ob.begin(), ob.end());
            m.emplace(std::move(occ), va * vb);
        }
    }
    return PureState(std::move(sys), std::move(m));
}

Amplitude inner(const PureState& a, const PureState& b) {
    if (!(a.system() == b.system()))
        throw Error(ErrorKind::SystemMismatch, "inner product of states on different systems");
    Amplitude s{};
    const bool a_smaller = a.support_size() <= b.support_size();
    const auto& small = a_smaller ? a.amplitudes() : b.amplitudes();
    const auto& large = a_smaller ? b.amplitudes() : a.amplitudes();
    for (const auto& [occ, v] : small) {
        auto it = large.find(occ);
        if (it == large.end()) continue;
        s += a_smaller ? std::conj(v) * it->second : std::conj(it->second) * v;
    }
    return s;
}

PureState normalize(const PureState& s) {
    const double n = s.norm();
    if (n < 1e-15) throw Error(ErrorKind::ZeroState, "cannot normalize a zero state");
    return s.scaled(1.0 / n);
}

PureState add(const PureState& a, const PureState& b) {
    if (!(a.system() == b.system()))
        throw Error(ErrorKind::SystemMismatch, "sum of states on different systems");
    StateBuilder builder(a.system());
    for (const auto& [occ, v] : a.amplitudes()) builder.add(occ, v);
    for (const auto& [occ, v] : b.amplitudes()) builder.add(occ, v);
    return std::move(builder).build();
}

Ensemble::Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error(ErrorKind::BadDistribution, "ensemble has no members");
    double total = 0.0;
    for (const auto& m : members_) {
        if (!(m.weight > 0.0 && m.weight <= 1.0))
            throw Error(ErrorKind::BadDistribution, "ensemble weight outside (0,1]");
        if (std::abs(m.state.norm_squared() - 1.0) > 1e-10)
            throw Error(ErrorKind::NotNormalized, "ensemble member is not normalized");
        if (!(m.state.system() == members_.front().state.system()))
            throw Error(ErrorKind::SystemMismatch, "ensemble members live on different systems");
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorKind::BadDistribution, "ensemble weights do not sum to 1");
}

} // namespace reduxion
