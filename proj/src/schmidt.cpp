#include "reduxion/schmidt.hpp"

#include "reduxion/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace reduxion {

namespace {

struct CutLayout {
    System gauge;
    System rest;
    std::vector<std::size_t> gauge_index; // positions in the full system
    std::vector<std::size_t> rest_index;
};

CutLayout make_layout(const System& system, const Bipartition& cut) {
    validate_cut(cut, system);
    CutLayout out;
    std::set<std::string> gauge_labels(cut.gauge_modes.begin(), cut.gauge_modes.end());
    std::vector<ModeSpec> gauge_modes, rest_modes;
    for (std::size_t i = 0; i < system.size(); ++i) {
        const auto& m = system.mode(i);
        if (gauge_labels.count(m.label)) {
            out.gauge_index.push_back(i);
            gauge_modes.push_back(m);
        } else {
            out.rest_index.push_back(i);
            rest_modes.push_back(m);
        }
    }
    out.gauge = System(std::move(gauge_modes));
    out.rest = System(std::move(rest_modes));
    return out;
}

Occupations project(const Occupations& occ, const std::vector<std::size_t>& index) {
    Occupations out(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) out[i] = occ[index[i]];
    return out;
}

// Dense amplitude matrix restricted to the labels present in the state; rows and
// columns are in lexicographic label order.
struct AmplitudeMatrix {
    Eigen::MatrixXcd m;
    std::vector<Occupations> rows;
    std::vector<Occupations> cols;
};

AmplitudeMatrix materialize(const PureState& s, const CutLayout& layout) {
    std::map<Occupations, Eigen::Index> row_of, col_of;
    for (const auto& [occ, amp] : s.amplitudes()) {
        row_of.emplace(project(occ, layout.gauge_index), 0);
        col_of.emplace(project(occ, layout.rest_index), 0);
    }
    AmplitudeMatrix out;
    for (auto& [occ, idx] : row_of) {
        idx = static_cast<Eigen::Index>(out.rows.size());
        out.rows.push_back(occ);
    }
    for (auto& [occ, idx] : col_of) {
        idx = static_cast<Eigen::Index>(out.cols.size());
        out.cols.push_back(occ);
    }
    out.m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(out.rows.size()),
                                   static_cast<Eigen::Index>(out.cols.size()));
    for (const auto& [occ, amp] : s.amplitudes())
        out.m(row_of.at(project(occ, layout.gauge_index)), col_of.at(project(occ, layout.rest_index))) = amp;
    return out;
}

Eigen::Index dominant_index(const Eigen::VectorXcd& v) {
    const double best = v.cwiseAbs2().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::norm(v(i)) >= best - 1e-12 * best) return i;
    return 0;
}

// Orthonormal basis of span(cols) chosen deterministically: project the standard
// basis vectors (rows in label order) onto the subspace and Gram-Schmidt them.
// A subspace spanned by basis kets comes back as exactly those kets.
Eigen::MatrixXcd canonical_basis(const Eigen::MatrixXcd& cols) {
    const Eigen::Index n = cols.rows();
    const Eigen::Index k = cols.cols();
    Eigen::MatrixXcd out(n, k);
    Eigen::Index found = 0;
    for (Eigen::Index r = 0; r < n && found < k; ++r) {
        Eigen::VectorXcd v = cols * cols.row(r).adjoint();
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < found; ++j) v -= out.col(j) * out.col(j).dot(v);
        const double nv = v.norm();
        if (nv > 1e-8) out.col(found++) = v / nv;
    }
    for (Eigen::Index c = 0; c < k && found < k; ++c) {
        Eigen::VectorXcd v = cols.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < found; ++j) v -= out.col(j) * out.col(j).dot(v);
        const double nv = v.norm();
        if (nv > 1e-8) out.col(found++) = v / nv;
    }
    return out;
}

PureState vector_to_state(const Eigen::VectorXcd& v, const std::vector<Occupations>& labels, const System& system) {
    PureState::AmplitudeMap m;
    for (Eigen::Index i = 0; i < v.size(); ++i) m.emplace(labels[static_cast<std::size_t>(i)], v(i));
    return PureState(system, std::move(m));
}

} // namespace

Bipartition gauge_cut(const System& system) {
    Bipartition cut;
    for (const auto& m : system.modes())
        (m.kind == ModeKind::GaugeBoson ? cut.gauge_modes : cut.rest_modes).push_back(m.label);
    return cut;
}

void validate_cut(const Bipartition& cut, const System& system) {
    if (cut.gauge_modes.empty()) throw Error(ErrorKind::InvalidBipartition, "gauge side is empty");
    std::set<std::string> seen;
    for (const auto& label : cut.gauge_modes) {
        auto idx = system.index_of(label);
        if (!idx) throw Error(ErrorKind::InvalidBipartition, "unknown gauge mode '" + label + "'");
        if (system.mode(*idx).kind != ModeKind::GaugeBoson)
            throw Error(ErrorKind::InvalidBipartition, "mode '" + label + "' is not a gauge boson mode");
        if (!seen.insert(label).second)
            throw Error(ErrorKind::InvalidBipartition, "mode '" + label + "' listed twice");
    }
    for (const auto& label : cut.rest_modes) {
        if (!system.index_of(label))
            throw Error(ErrorKind::InvalidBipartition, "unknown rest mode '" + label + "'");
        if (!seen.insert(label).second)
            throw Error(ErrorKind::InvalidBipartition, "mode '" + label + "' on both sides");
    }
    if (seen.size() != system.size())
        throw Error(ErrorKind::InvalidBipartition, "cut does not cover every mode");
}

SchmidtDecomposition::SchmidtDecomposition(System system, Bipartition cut, std::vector<SchmidtTerm> terms)
    : system_(std::move(system)), cut_(std::move(cut)), terms_(std::move(terms)) {}

PureState SchmidtDecomposition::branch(std::size_t j) const {
    const auto& t = terms_.at(j);
    return tensor(t.gauge, t.rest).reordered(system_);
}

PureState SchmidtDecomposition::reconstruct() const {
    StateBuilder builder(system_);
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const PureState b = branch(j);
        for (const auto& [occ, amp] : b.amplitudes()) builder.add(occ, terms_[j].coefficient * amp);
    }
    return std::move(builder).build();
}

SchmidtDecomposition schmidt_decompose(const PureState& s, const Bipartition& cut) {
    const CutLayout layout = make_layout(s.system(), cut);
    if (std::abs(s.norm_squared() - 1.0) > 1e-9)
        throw Error(ErrorKind::NotNormalized, "Schmidt decomposition needs a normalized state");

    const AmplitudeMatrix am = materialize(s, layout);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(am.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::MatrixXcd& U = svd.matrixU();

    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > kRankThreshold) ++rank;

    struct Raw {
        double c;
        Eigen::VectorXcd g;
        Eigen::VectorXcd r;
        Eigen::Index dom;
    };
    std::vector<SchmidtTerm> terms;
    Eigen::Index i = 0;
    while (i < rank) {
        Eigen::Index j = i + 1;
        while (j < rank && sv(i) - sv(j) < kTieThreshold) ++j;

        const Eigen::MatrixXcd gauge_cols = (j - i == 1) ? Eigen::MatrixXcd(U.col(i))
                                                         : canonical_basis(U.middleCols(i, j - i));
        std::vector<Raw> cluster;
        for (Eigen::Index c = 0; c < gauge_cols.cols(); ++c) {
            Eigen::VectorXcd g = gauge_cols.col(c);
            const Eigen::Index dom = dominant_index(g);
            g *= std::polar(1.0, -std::arg(g(dom)));
            g(dom) = std::abs(g(dom));
            Eigen::VectorXcd r = am.m.transpose() * g.conjugate();
            const double coeff = r.norm();
            r /= coeff;
            cluster.push_back({coeff, std::move(g), std::move(r), dom});
        }
        std::stable_sort(cluster.begin(), cluster.end(), [&](const Raw& a, const Raw& b) {
            return am.rows[static_cast<std::size_t>(a.dom)] < am.rows[static_cast<std::size_t>(b.dom)];
        });
        for (auto& raw : cluster) {
            terms.push_back({raw.c, vector_to_state(raw.g, am.rows, layout.gauge),
                             vector_to_state(raw.r, am.cols, layout.rest)});
        }
        i = j;
    }
    return SchmidtDecomposition(s.system(), cut, std::move(terms));
}

std::vector<double> schmidt_weights(const SchmidtDecomposition& d) {
    std::vector<double> w;
    w.reserve(d.rank());
    for (const auto& t : d.terms()) w.push_back(t.coefficient * t.coefficient);
    return w;
}

std::vector<double> schmidt_spectrum(const PureState& s, const Bipartition& cut) {
    const CutLayout layout = make_layout(s.system(), cut);
    const AmplitudeMatrix am = materialize(s, layout);
    std::vector<double> w;
    if (am.m.rows() == 1 || am.m.cols() == 1) {
        const double n2 = am.m.squaredNorm();
        if (n2 > kRankThreshold * kRankThreshold) w.push_back(n2);
        return w;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(am.m);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double v = svd.singularValues()(i);
        if (v > kRankThreshold) w.push_back(v * v);
    }
    return w;
}

} // namespace reduxion
