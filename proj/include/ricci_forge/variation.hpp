#pragma once

// Canonical variation of a Riemannian submersion with totally geodesic fibers:
// Ricci blocks of the fiber-scaled metric g_t in the frame {H_i, W_j/t}, the
// inverse map from Ricci blocks to A-tensor invariants, and the O(t) error
// inequalities.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "lie.hpp"
#include "oracle.hpp"

namespace ricci_forge::variation {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SubmersionData {
    int dimB = 0;
    int dimF = 0;
    Mat ricB;    // dimB x dimB
    Mat ricF;    // dimF x dimF
    Mat aUV;     // dimF x dimF, <AU, AV>
    Mat aXY;     // dimB x dimB, <A_X, A_Y>
    Mat deltaA;  // dimB x dimF, <(delta A)(X), U>
};

struct ScaledRicci {
    double t = 1.0;
    Mat vv;  // Ric(W_i/t, W_j/t)
    Mat hh;  // Ric(H_i, H_j)
    Mat hv;  // Ric(H_i, W_j/t)

    /// Full matrix in the order {W_1/t.., H_1..}.
    Mat assemble() const {
        const auto f = vv.rows();
        const auto b = hh.rows();
        Mat M(f + b, f + b);
        M.topLeftCorner(f, f) = vv;
        M.bottomRightCorner(b, b) = hh;
        M.bottomLeftCorner(b, f) = hv;
        M.topRightCorner(f, b) = hv.transpose();
        return M;
    }
};

struct AInvariants {
    Mat aUV;
    Mat aXY;
    Mat deltaA;
};

inline void check_shapes(const SubmersionData& d) {
    auto shape = [](const Mat& m, Eigen::Index r, Eigen::Index c, const char* name) {
        if (m.rows() != r || m.cols() != c) {
            std::ostringstream os;
            os << name << " must be " << r << "x" << c << ", got " << m.rows() << "x" << m.cols();
            throw SpecError(os.str());
        }
    };
    if (d.dimB < 1 || d.dimF < 1) throw SpecError("dimB and dimF must be positive");
    shape(d.ricB, d.dimB, d.dimB, "ricB");
    shape(d.ricF, d.dimF, d.dimF, "ricF");
    shape(d.aUV, d.dimF, d.dimF, "aUV");
    shape(d.aXY, d.dimB, d.dimB, "aXY");
    shape(d.deltaA, d.dimB, d.dimF, "deltaA");
}

/// Violations of the data invariants (diagonal Ricci blocks, positive
/// semidefinite A-tensor Gram matrices). Empty when the data are consistent.
inline std::vector<std::string> invariant_violations(const SubmersionData& d) {
    check_shapes(d);
    std::vector<std::string> out;
    auto off_diag = [](const Mat& m) {
        Mat o = m;
        o.diagonal().setZero();
        return o.cwiseAbs().maxCoeff();
    };
    auto min_eig = [](const Mat& m) {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    };
    auto asym = [](const Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); };
    if (off_diag(d.ricB) > 1e-10) out.emplace_back("ricB is not diagonal");
    if (off_diag(d.ricF) > 1e-10) out.emplace_back("ricF is not diagonal");
    for (auto [m, name] : {std::pair{&d.aUV, "aUV"}, {&d.aXY, "aXY"}}) {
        if (asym(*m) > 1e-10) out.emplace_back(std::string(name) + " is not symmetric");
        if (min_eig(*m) < -1e-10) out.emplace_back(std::string(name) + " is not positive semidefinite");
    }
    return out;
}

inline ScaledRicci canonical_variation_ricci(const SubmersionData& d, double t) {
    check_shapes(d);
    if (!(t > 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "t must lie in (0, 1], got " << t;
        throw SpecError(os.str());
    }
    ScaledRicci s;
    s.t = t;
    s.vv = d.ricF / (t * t) + t * t * d.aUV;
    s.hh = d.ricB - 2 * t * t * d.aXY;
    s.hv = -t * d.deltaA;
    return s;
}

inline AInvariants a_invariants_from_ricci(const Mat& ricE_vv, const Mat& ricE_hh, const Mat& ricE_hv,
                                           const Mat& ricB, const Mat& ricF) {
    if (ricE_vv.rows() != ricF.rows() || ricE_vv.cols() != ricF.cols() || ricE_hh.rows() != ricB.rows() ||
        ricE_hh.cols() != ricB.cols() || ricE_hv.rows() != ricB.rows() || ricE_hv.cols() != ricF.rows())
        throw SpecError("inconsistent block dimensions");
    return {ricE_vv - ricF, (ricB - ricE_hh) / 2, -ricE_hv};
}

inline SubmersionData with_invariants(SubmersionData d, const AInvariants& a) {
    d.aUV = a.aUV;
    d.aXY = a.aXY;
    d.deltaA = a.deltaA;
    return d;
}

/// Smallest C for which the error inequalities hold for every t in (0, 1].
inline double derived_error_constant(const SubmersionData& d) {
    check_shapes(d);
    return std::max({d.aUV.cwiseAbs().maxCoeff(), 2 * d.aXY.cwiseAbs().maxCoeff(), d.deltaA.cwiseAbs().maxCoeff()});
}

struct Violation {
    std::string inequality;  // "offdiag-vv", "offdiag-hh", "mixed-hv", "vv-lower", "hh-lower"
    double t = 0.0;
    int i = 0;
    int j = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ErrorBoundReport {
    double C = 0.0;
    std::vector<double> ts;
    std::vector<Violation> violations;
    // Largest entry magnitude of each invariant, for per-tensor slack.
    double max_aUV = 0.0;
    double max_aXY = 0.0;
    double max_deltaA = 0.0;
    double min_slack = INFINITY;
    bool pass() const { return violations.empty(); }
};

inline ErrorBoundReport error_bound_check(const SubmersionData& d, double C, const std::vector<double>& ts) {
    check_shapes(d);
    ErrorBoundReport rep;
    rep.C = C;
    rep.ts = ts;
    rep.max_aUV = d.aUV.cwiseAbs().maxCoeff();
    rep.max_aXY = d.aXY.cwiseAbs().maxCoeff();
    rep.max_deltaA = d.deltaA.cwiseAbs().maxCoeff();
    // Rounding allowance; the Hopf data meet the horizontal bound with equality.
    auto holds = [&](double lhs, double rhs) { return lhs <= rhs + 1e-12 * (1 + std::abs(rhs)); };
    for (double t : ts) {
        const ScaledRicci s = canonical_variation_ricci(d, t);
        auto check = [&](const char* name, int i, int j, double small, double large) {
            rep.min_slack = std::min(rep.min_slack, large - small);
            if (!holds(small, large)) rep.violations.push_back({name, t, i, j, small, large});
        };
        for (int i = 0; i < d.dimF; ++i)
            for (int j = 0; j < d.dimF; ++j)
                if (i != j) check("offdiag-vv", i, j, std::abs(s.vv(i, j)), C * t);
        for (int i = 0; i < d.dimB; ++i)
            for (int j = 0; j < d.dimB; ++j)
                if (i != j) check("offdiag-hh", i, j, std::abs(s.hh(i, j)), C * t);
        for (int i = 0; i < d.dimB; ++i)
            for (int j = 0; j < d.dimF; ++j) check("mixed-hv", i, j, std::abs(s.hv(i, j)), C * t);
        for (int i = 0; i < d.dimF; ++i) check("vv-lower", i, i, d.ricF(i, i) / (t * t), s.vv(i, i));
        for (int i = 0; i < d.dimB; ++i) check("hh-lower", i, i, d.ricB(i, i) - C * t * t, s.hh(i, i));
    }
    return rep;
}

// ---------------------------------------------------------------------------

/// The Hopf fibration S^3(1) -> S^2(1/2) with fiber along the left-invariant
/// field X_1; every Ricci block comes from the chart oracle.
inline SubmersionData hopf_preset(const oracle::Options& opt = {}) {
    const auto G = lie::s3_chart();
    const Vec one = Vec::Ones(3);
    const auto total = oracle::left_invariant(G, one);
    const Mat ricE = oracle::frame_ricci(total, oracle::left_invariant_frame(G, one, G.base_point), opt);

    const auto base = oracle::sphere(2, 0.5);
    Vec y(2);
    y << 0.3, -0.2;
    const Mat ricB = oracle::frame_ricci(base, oracle::gram_schmidt_frame(base, y), opt);

    const auto fiber = oracle::euclidean(1);
    const Mat ricF = oracle::frame_ricci(fiber, oracle::gram_schmidt_frame(fiber, Vec::Zero(1)), opt);

    SubmersionData d;
    d.dimB = 2;
    d.dimF = 1;
    d.ricB = ricB;
    d.ricF = ricF;
    const auto a = a_invariants_from_ricci(ricE.topLeftCorner(1, 1), ricE.bottomRightCorner(2, 2),
                                           ricE.bottomLeftCorner(2, 1), ricB, ricF);
    return with_invariants(d, a);
}

/// Oracle Ricci of the Berger sphere (fiber X_1 scaled by t) in the frame
/// {X_1/t, X_2, X_3}, the same ordering as ScaledRicci::assemble().
inline Mat berger_ricci(double t, const oracle::Options& opt = {}) {
    if (!(t > 0.0 && t <= 1.0)) throw SpecError("t must lie in (0, 1]");
    const auto G = lie::s3_chart();
    Vec lambda(3);
    lambda << t, 1, 1;
    return oracle::frame_ricci(oracle::left_invariant(G, lambda), oracle::left_invariant_frame(G, lambda, G.base_point),
                               opt);
}

}  // namespace ricci_forge::variation
