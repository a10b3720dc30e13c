#pragma once

// Ricci tensor of g = dr^2 + f(r)^2 ds^2_{p-1} + sum_i h_i(r)^2 sigma_i^2 on
// E x S^{p-1} x (0, inf) in the orthonormal frame {d/dr, U_a, Y_i = X_i/h_i},
// plus positive-definiteness checks and a cross-check against the chart oracle.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "exprs.hpp"
#include "lie.hpp"
#include "oracle.hpp"

namespace ricci_forge::warped {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ric of the fiber metric g_r in the Y frame, as a function of r.
struct BaseRicci {
    enum class Kind { Zero, Constant, ScaledIdentity, LeftInvariant };
    Kind kind = Kind::Zero;
    Mat constant;
    std::optional<exprs::Expr> scale;

    static BaseRicci zero() { return {}; }
    static BaseRicci constant_matrix(Mat m) { return {Kind::Constant, std::move(m), std::nullopt}; }
    static BaseRicci scaled_identity(exprs::Expr e) { return {Kind::ScaledIdentity, {}, std::move(e)}; }
    static BaseRicci left_invariant() { return {Kind::LeftInvariant, {}, std::nullopt}; }
};

struct WarpedFamilySpec {
    int n = 0;
    exprs::Expr f = exprs::variable();
    std::vector<exprs::Expr> h;
    lie::StructureConstants structure;  // C^k_ij of the r-independent frame X_i
    BaseRicci base_ricci;
    std::string chart = "flat";  // group chart realizing E for oracle checks
};

struct RicciBlocks {
    double rr = 0.0;
    double uu = 0.0;
    Mat yy;
    Vec ry;
    int p = 2;
    double r = 0.0;
    bool ry_trusted = true;

    /// The full (n+p) x (n+p) matrix in the order {d/dr, U_1..U_{p-1}, Y_1..Y_n}.
    Mat assemble() const {
        const int n = static_cast<int>(yy.rows());
        const int u = p - 1;
        Mat M = Mat::Zero(n + p, n + p);
        M(0, 0) = rr;
        for (int a = 0; a < u; ++a) M(1 + a, 1 + a) = uu;
        for (int i = 0; i < n; ++i) {
            M(0, p + i) = ry(i);
            M(p + i, 0) = ry(i);
            for (int j = 0; j < n; ++j) M(p + i, p + j) = yy(i, j);
        }
        return M;
    }
};

/// Values of the profiles and their first two derivatives at one r.
struct ProfileSample {
    double r = 0.0;
    double f = 0.0, f1 = 0.0, f2 = 0.0;
    Vec h, h1, h2;
};

inline void validate(const WarpedFamilySpec& s) {
    if (s.n < 0) throw SpecError("n must be nonnegative");
    if (static_cast<int>(s.h.size()) != s.n)
        throw SpecError("expected " + std::to_string(s.n) + " h profiles, got " + std::to_string(s.h.size()));
    if (s.structure.dim() != 0 && s.structure.dim() != s.n) throw SpecError("structure constants have wrong dimension");
    if (s.base_ricci.kind == BaseRicci::Kind::Constant &&
        (s.base_ricci.constant.rows() != s.n || s.base_ricci.constant.cols() != s.n))
        throw SpecError("constant base Ricci must be " + std::to_string(s.n) + "x" + std::to_string(s.n));
    if (s.base_ricci.kind == BaseRicci::Kind::Constant &&
        (s.base_ricci.constant - s.base_ricci.constant.transpose()).cwiseAbs().maxCoeff() > 0)
        throw SpecError("constant base Ricci must be symmetric");
}

/// True when <[Y_i,Y_j],Y_i> = 0 for all i, j.
inline bool adapted_frame(const lie::StructureConstants& C) {
    for (int i = 0; i < C.dim(); ++i)
        for (int j = 0; j < C.dim(); ++j)
            if (C(i, j, i) != 0.0) return false;
    return true;
}

/// A spec with its derivative trees built once.
class WarpedFamily {
  public:
    explicit WarpedFamily(WarpedFamilySpec spec) : spec_(std::move(spec)), f_(spec_.f) {
        validate(spec_);
        if (spec_.structure.dim() == 0) spec_.structure = lie::StructureConstants(spec_.n);
        for (const auto& e : spec_.h) h_.emplace_back(e);
        trusted_ = adapted_frame(spec_.structure);
    }

    const WarpedFamilySpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    bool ry_trusted() const { return trusted_; }

    ProfileSample sample(double r) const {
        if (!(r > 0.0)) throw DomainError("warped metric is only evaluated at r > 0");
        ProfileSample s;
        s.r = r;
        const auto fv = f_.at(r);
        s.f = fv.v;
        s.f1 = fv.d1;
        s.f2 = fv.d2;
        if (!(s.f > 0.0)) {
            std::ostringstream os;
            os << "f(" << r << ") = " << s.f << " is not positive";
            throw DomainError(os.str());
        }
        const int n = spec_.n;
        s.h.resize(n);
        s.h1.resize(n);
        s.h2.resize(n);
        for (int i = 0; i < n; ++i) {
            const auto hv = h_[static_cast<std::size_t>(i)].at(r);
            if (!(hv.v > 0.0)) {
                std::ostringstream os;
                os << "h[" << i << "](" << r << ") = " << hv.v << " is not positive";
                throw DomainError(os.str());
            }
            s.h(i) = hv.v;
            s.h1(i) = hv.d1;
            s.h2(i) = hv.d2;
        }
        return s;
    }

    Mat base_ricci(const ProfileSample& s) const {
        const int n = spec_.n;
        const BaseRicci& b = spec_.base_ricci;
        switch (b.kind) {
            case BaseRicci::Kind::Zero: return Mat::Zero(n, n);
            case BaseRicci::Kind::Constant: return b.constant;
            case BaseRicci::Kind::ScaledIdentity: return exprs::eval(*b.scale, s.r) * Mat::Identity(n, n);
            case BaseRicci::Kind::LeftInvariant:
                return n == 0 ? Mat(0, 0) : lie::left_invariant_ricci(spec_.structure, s.h);
        }
        return Mat::Zero(n, n);
    }

    RicciBlocks ricci(const ProfileSample& s, int p) const { return ricci(s, base_ricci(s), p); }

    RicciBlocks ricci(const ProfileSample& s, const Mat& base, int p) const {
        if (p < 2) throw SpecError("p must be at least 2, got " + std::to_string(p));
        const int n = spec_.n;
        const double pm1 = p - 1;
        const Vec sl = s.h1.cwiseQuotient(s.h);  // h_i'/h_i
        const double sum_sl = sl.sum();
        const double lf = s.f1 / s.f;

        RicciBlocks B;
        B.p = p;
        B.r = s.r;
        B.ry_trusted = trusted_;
        B.uu = (p - 2) * (1 - s.f1 * s.f1) / (s.f * s.f) - lf * sum_sl - s.f2 / s.f;
        B.rr = -pm1 * s.f2 / s.f;
        for (int i = 0; i < n; ++i) B.rr -= s.h2(i) / s.h(i);
        B.yy = base;
        for (int i = 0; i < n; ++i)
            B.yy(i, i) = base(i, i) - pm1 * lf * sl(i) - sl(i) * (sum_sl - sl(i)) - s.h2(i) / s.h(i);
        B.ry = Vec::Zero(n);
        if (!trusted_) {
            const auto& C = spec_.structure;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    if (i != j) B.ry(j) += C(i, j, i) / s.h(j) * (sl(i) + sl(j));
        }
        return B;
    }

  private:
    WarpedFamilySpec spec_;
    exprs::Profile f_;
    std::vector<exprs::Profile> h_;
    bool trusted_ = true;
};

inline RicciBlocks ricci_warped(const WarpedFamilySpec& spec, double r, int p) {
    const WarpedFamily fam(spec);
    return fam.ricci(fam.sample(r), p);
}

// ---------------------------------------------------------------------------

struct PdResult {
    bool positive_definite = false;
    double min_eigen = 0.0;
};

/// Positive definiteness of the reduced block {d/dr, Y} together with uu > 0.
/// With slack > 0 every Y-Y off-diagonal entry may additionally be perturbed by
/// up to `slack`, and min_eigen is the Gershgorin lower bound.
inline PdResult assemble_and_check_pd(const RicciBlocks& b, double off_diag_slack = 0.0) {
    const int n = static_cast<int>(b.yy.rows());
    Mat M(n + 1, n + 1);
    M(0, 0) = b.rr;
    for (int i = 0; i < n; ++i) {
        M(0, i + 1) = b.ry(i);
        M(i + 1, 0) = b.ry(i);
        for (int j = 0; j < n; ++j) M(i + 1, j + 1) = b.yy(i, j);
    }
    double lo = b.uu;
    if (off_diag_slack > 0.0) {
        for (int i = 0; i <= n; ++i) {
            double margin = M(i, i);
            for (int j = 0; j <= n; ++j)
                if (j != i) margin -= std::abs(M(i, j)) + (i > 0 && j > 0 ? off_diag_slack : 0.0);
            lo = std::min(lo, margin);
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return {lo > 0.0, lo};
}

// ---------------------------------------------------------------------------
// Oracle realization

/// Chart (r, y_1..y_{p-1}, x_E) with y stereographic on the unit sphere.
inline oracle::ChartMetric warped_chart(const WarpedFamily& fam, int p) {
    const auto G = lie::group_chart(fam.spec().chart, fam.n());
    const int n = fam.n();
    const int d = n + p;
    if (d > oracle::kMaxDim)
        throw SpecError("warped chart of dimension " + std::to_string(d) + " exceeds the oracle limit " +
                        std::to_string(oracle::kMaxDim));
    const exprs::Expr f = fam.spec().f;
    const std::vector<exprs::Expr> h = fam.spec().h;
    oracle::ChartMetric m;
    m.dim = d;
    m.label = "warped";
    m.g = [=](const Vec& x) {
        Mat g = Mat::Zero(d, d);
        const double r = x(0);
        g(0, 0) = 1.0;
        const Vec y = x.segment(1, p - 1);
        const double fv = exprs::eval(f, r);
        const double s = 1.0 + y.squaredNorm();
        g.block(1, 1, p - 1, p - 1) = Mat::Identity(p - 1, p - 1) * (4.0 * fv * fv / (s * s));
        if (n > 0) {
            const Mat S = G.coframe(x.segment(p, n));
            Vec h2(n);
            for (int i = 0; i < n; ++i) {
                const double hv = exprs::eval(h[static_cast<std::size_t>(i)], r);
                h2(i) = hv * hv;
            }
            g.block(p, p, n, n) = S.transpose() * h2.asDiagonal() * S;
        }
        return g;
    };
    m.domain = [=](const Vec& x) {
        return x(0) > 0.0 && x.segment(1, p - 1).norm() <= 2.0 && (n == 0 || G.domain(x.segment(p, n)));
    };
    return m;
}

/// Chart point and the frame {d/dr, V_a/f, X_i/h_i} there.
inline oracle::FrameAtPoint warped_frame(const WarpedFamily& fam, int p, double r) {
    const auto G = lie::group_chart(fam.spec().chart, fam.n());
    const int n = fam.n();
    const int d = n + p;
    Vec x(d);
    x(0) = r;
    for (int a = 0; a < p - 1; ++a) x(1 + a) = 0.15 * (a % 2 == 0 ? 1 : -1) * (1 + 0.5 * a);
    if (n > 0) x.segment(p, n) = G.base_point;
    const auto s = fam.sample(r);
    Mat V = Mat::Zero(d, d);
    V(0, 0) = 1.0;
    const double conformal = (1.0 + x.segment(1, p - 1).squaredNorm()) / 2.0;
    for (int a = 0; a < p - 1; ++a) V(1 + a, 1 + a) = conformal / s.f;
    if (n > 0) {
        const Mat X = G.coframe(x.segment(p, n)).inverse();
        for (int i = 0; i < n; ++i) V.block(p, p + i, n, 1) = X.col(i) / s.h(i);
    }
    return {x, V};
}

struct Deviation {
    std::string entry;  // "rr", "uu", "yy[i][j]", "ry[j]", "uu-isotropy"
    double r = 0.0;
    double closed_form = 0.0;
    double oracle = 0.0;
    double deviation = 0.0;
    bool gating = true;
};

struct VerifyReport {
    int p = 0;
    double tol = 0.0;
    bool ry_trusted = true;
    std::vector<Deviation> entries;
    bool pass = true;
    double max_gating_deviation = 0.0;
    double max_ry_deviation = 0.0;
};

inline void require_realizable(const WarpedFamilySpec& s) {
    const auto kind = s.base_ricci.kind;
    if (s.chart == "flat") {
        if (kind != BaseRicci::Kind::Zero && kind != BaseRicci::Kind::LeftInvariant)
            throw SpecError("flat chart realizes only a zero base Ricci");
        if (s.structure.dim() != 0 && !s.structure.zero())
            throw SpecError("flat chart realizes only vanishing structure constants");
        return;
    }
    const auto G = lie::group_chart(s.chart, s.n);
    if (kind != BaseRicci::Kind::LeftInvariant)
        throw SpecError("chart '" + s.chart + "' needs baseRicci \"leftInvariant\"");
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j)
            for (int k = 0; k < s.n; ++k)
                if (std::abs(s.structure(i, j, k) - G.structure(i, j, k)) > 1e-12)
                    throw SpecError("structure constants do not match chart '" + s.chart + "'");
}

/// Compares closed-form blocks with oracle frame Ricci at each r. The mixed
/// d/dr-Y entries are reported but never gate the result.
inline VerifyReport verify_against_oracle(const WarpedFamilySpec& spec, int p, const std::vector<double>& rs,
                                          double tol, const oracle::Options& opt = {}) {
    if (p < 2) throw SpecError("p must be at least 2");
    if (!(tol > 0)) throw SpecError("tolerance must be positive");
    WarpedFamilySpec s = spec;
    if (s.structure.dim() == 0) s.structure = lie::StructureConstants(s.n);
    require_realizable(s);
    const WarpedFamily fam(s);
    const auto chart = warped_chart(fam, p);
    const int n = fam.n();

    VerifyReport rep;
    rep.p = p;
    rep.tol = tol;
    rep.ry_trusted = fam.ry_trusted();
    auto add = [&](std::string name, double r, double cf, double orc, bool gating) {
        const double dev = std::abs(cf - orc);
        rep.entries.push_back({std::move(name), r, cf, orc, dev, gating});
        if (gating) {
            rep.max_gating_deviation = std::max(rep.max_gating_deviation, dev);
            if (!(dev <= tol)) rep.pass = false;
        } else {
            rep.max_ry_deviation = std::max(rep.max_ry_deviation, dev);
        }
    };
    for (double r : rs) {
        const auto B = fam.ricci(fam.sample(r), p);
        const Mat R = oracle::frame_ricci(chart, warped_frame(fam, p, r), opt);
        add("rr", r, B.rr, R(0, 0), true);
        double u_mean = 0.0;
        double u_spread = 0.0;
        for (int a = 1; a < p; ++a) u_mean += R(a, a);
        u_mean /= (p - 1);
        for (int a = 1; a < p; ++a) {
            u_spread = std::max(u_spread, std::abs(R(a, a) - u_mean));
            for (int b = 1; b < p; ++b)
                if (a != b) u_spread = std::max(u_spread, std::abs(R(a, b)));
            u_spread = std::max(u_spread, std::abs(R(0, a)));
            for (int i = 0; i < n; ++i) u_spread = std::max(u_spread, std::abs(R(a, p + i)));
        }
        add("uu", r, B.uu, u_mean, true);
        add("uu-isotropy", r, 0.0, u_spread, true);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                add("yy[" + std::to_string(i) + "][" + std::to_string(j) + "]", r, B.yy(i, j), R(p + i, p + j), true);
        // When the frame is adapted both sides must vanish, so the comparison gates.
        for (int j = 0; j < n; ++j) add("ry[" + std::to_string(j) + "]", r, B.ry(j), R(0, p + j), fam.ry_trusted());
    }
    return rep;
}

// ---------------------------------------------------------------------------

struct SmoothnessCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double at = 0.0;  // r where the value was taken
};

struct SmoothnessReport {
    std::vector<SmoothnessCheck> checks;
    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const SmoothnessCheck& c) { return c.pass; });
    }
};

/// Conditions for the warped metric to extend smoothly over r = 0.
inline SmoothnessReport smoothness_check(const WarpedFamilySpec& spec, double tol, double r_max = 50.0,
                                         int grid = 400) {
    validate(spec);
    auto at_zero = [](const exprs::Expr& e) -> std::pair<double, double> {
        try {
            const double v = exprs::eval(e, 0.0);
            if (std::isfinite(v)) return {v, 0.0};
        } catch (const DomainError&) {
        }
        return {exprs::eval(e, 1e-6), 1e-6};
    };
    const exprs::Profile F(spec.f);
    SmoothnessReport rep;
    auto push = [&](std::string name, const exprs::Expr& e, double target) {
        const auto [v, r] = at_zero(e);
        rep.checks.push_back({std::move(name), std::abs(v - target) <= tol, v, r});
    };
    push("f(0)=0", F.f, 0.0);
    push("f'(0)=1", F.d1, 1.0);
    push("f''(0)=0", F.d2, 0.0);

    double fmin = INFINITY;
    double fmin_r = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double r = 1e-6 * std::pow(r_max / 1e-6, static_cast<double>(k) / (grid - 1));
        double v = -INFINITY;
        try {
            v = exprs::eval(spec.f, r);
        } catch (const DomainError&) {
        }
        if (!(v >= fmin)) {
            fmin = std::isnan(v) ? -INFINITY : v;
            fmin_r = r;
        }
    }
    rep.checks.push_back({"f>0 on grid", fmin > 0.0, fmin, fmin_r});
    for (int i = 0; i < spec.n; ++i) {
        const exprs::Profile H(spec.h[static_cast<std::size_t>(i)]);
        push("h[" + std::to_string(i) + "]'(0)=0", H.d1, 0.0);
    }
    return rep;
}

}  // namespace ricci_forge::warped
