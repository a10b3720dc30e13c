#pragma once

// Numerical curvature of coordinate-chart metrics. Metric derivatives come from
// fourth-order central differences with one Richardson level; everything after
// that (inverse metric, Christoffel symbols and their derivatives, Riemann,
// Ricci) is exact algebra on those derivatives.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "lie.hpp"

namespace ricci_forge::oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr int kMaxDim = 8;

struct ChartMetric {
    int dim = 0;
    std::function<Mat(const Vec&)> g;
    std::function<bool(const Vec&)> domain = [](const Vec&) { return true; };
    std::string label;
};

struct FrameAtPoint {
    Vec x;
    Mat V;  // columns are the frame vectors
};

struct Options {
    double step = 1e-3;
    bool richardson = true;
};

/// Dense d x d x d array, T(a, b, c).
class Tensor3 {
  public:
    explicit Tensor3(int d = 0) : d_(d), v_(static_cast<std::size_t>(d * d * d), 0.0) {}
    int dim() const { return d_; }
    double& operator()(int a, int b, int c) { return v_[idx(a, b, c)]; }
    double operator()(int a, int b, int c) const { return v_[idx(a, b, c)]; }

  private:
    std::size_t idx(int a, int b, int c) const { return static_cast<std::size_t>((a * d_ + b) * d_ + c); }
    int d_;
    std::vector<double> v_;
};

/// Dense d x d x d x d array, T(a, b, c, e).
class Tensor4 {
  public:
    explicit Tensor4(int d = 0) : d_(d), v_(static_cast<std::size_t>(d * d * d * d), 0.0) {}
    int dim() const { return d_; }
    double& operator()(int a, int b, int c, int e) { return v_[idx(a, b, c, e)]; }
    double operator()(int a, int b, int c, int e) const { return v_[idx(a, b, c, e)]; }

  private:
    std::size_t idx(int a, int b, int c, int e) const {
        return static_cast<std::size_t>(((a * d_ + b) * d_ + c) * d_ + e);
    }
    int d_;
    std::vector<double> v_;
};

/// Curvature data at one point.
struct Curvature {
    Vec x;
    Mat g;
    Mat ginv;
    Tensor3 gamma;    // gamma(k, i, j) = Gamma^k_ij
    Tensor4 riemann;  // riemann(rho, sigma, mu, nu) = R^rho_{sigma mu nu}
    Mat ricci_raw;    // before symmetrization
    Mat ricci;        // symmetrized
    double asymmetry = 0.0;
};

namespace detail {

struct MetricJet {
    Mat g;
    std::vector<Mat> dg;   // dg[l] = d_l g
    std::vector<Mat> ddg;  // ddg[l*d+m] = d_l d_m g
};

inline Mat eval_checked(const ChartMetric& m, const Vec& x) {
    if (!m.domain(x)) {
        std::ostringstream os;
        os << "stencil point (" << x.transpose() << ") outside the domain of chart '" << m.label << "'";
        throw DomainError(os.str());
    }
    Mat g = m.g(x);
    if (g.rows() != m.dim || g.cols() != m.dim) throw SpecError("metric evaluator returned wrong shape");
    if (!g.allFinite()) throw DomainError("metric of chart '" + m.label + "' is not finite at a stencil point");
    return g;
}

inline MetricJet jet(const ChartMetric& m, const Vec& x, double step) {
    const int d = m.dim;
    Vec h(d);
    for (int l = 0; l < d; ++l) h(l) = step * std::max(1.0, std::abs(x(l)));

    static constexpr int off[4] = {-2, -1, 1, 2};
    static constexpr double w1[4] = {1.0, -8.0, 8.0, -1.0};  // /12h

    MetricJet J;
    J.g = eval_checked(m, x);
    J.dg.assign(static_cast<std::size_t>(d), Mat::Zero(d, d));
    J.ddg.assign(static_cast<std::size_t>(d * d), Mat::Zero(d, d));

    auto shifted = [&](int l, int a, int mm, int b) {
        Vec y = x;
        y(l) += a * h(l);
        if (mm >= 0) y(mm) += b * h(mm);
        return eval_checked(m, y);
    };

    for (int l = 0; l < d; ++l) {
        Mat gp[4];
        for (int s = 0; s < 4; ++s) gp[s] = shifted(l, off[s], -1, 0);
        Mat d1 = Mat::Zero(d, d);
        for (int s = 0; s < 4; ++s) d1 += w1[s] * gp[s];
        J.dg[static_cast<std::size_t>(l)] = d1 / (12.0 * h(l));
        const Mat d2 = -gp[0] + 16.0 * gp[1] - 30.0 * J.g + 16.0 * gp[2] - gp[3];
        J.ddg[static_cast<std::size_t>(l * d + l)] = d2 / (12.0 * h(l) * h(l));
    }
    for (int l = 0; l < d; ++l)
        for (int mm = l + 1; mm < d; ++mm) {
            Mat acc = Mat::Zero(d, d);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) acc += (w1[a] * w1[b]) * shifted(l, off[a], mm, off[b]);
            acc /= 144.0 * h(l) * h(mm);
            J.ddg[static_cast<std::size_t>(l * d + mm)] = acc;
            J.ddg[static_cast<std::size_t>(mm * d + l)] = acc;
        }
    return J;
}

inline MetricJet richardson(const MetricJet& coarse, const MetricJet& fine) {
    MetricJet J = fine;
    for (std::size_t i = 0; i < J.dg.size(); ++i) J.dg[i] = (16.0 * fine.dg[i] - coarse.dg[i]) / 15.0;
    for (std::size_t i = 0; i < J.ddg.size(); ++i) J.ddg[i] = (16.0 * fine.ddg[i] - coarse.ddg[i]) / 15.0;
    return J;
}

inline Mat checked_inverse(const Mat& g, const std::string& label) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) {
        std::ostringstream os;
        os << "metric of chart '" << label << "' is not positive definite (min eigenvalue " << lo << ")";
        throw SingularMetricError(os.str());
    }
    if (hi / lo > 1e12) {
        std::ostringstream os;
        os << "metric of chart '" << label << "' is singular to working precision (condition " << hi / lo << ")";
        throw SingularMetricError(os.str());
    }
    return g.llt().solve(Mat::Identity(g.rows(), g.cols()));
}

}  // namespace detail

inline void validate_point(const ChartMetric& m, const Vec& x) {
    if (m.dim < 1 || m.dim > kMaxDim)
        throw SpecError("chart dimension " + std::to_string(m.dim) + " outside [1, " + std::to_string(kMaxDim) + "]");
    if (x.size() != m.dim) throw SpecError("point has wrong dimension for chart '" + m.label + "'");
}

/// Full curvature computation at x.
inline Curvature curvature(const ChartMetric& m, const Vec& x, const Options& opt = {}) {
    validate_point(m, x);
    if (!(opt.step > 0.0)) throw SpecError("finite-difference step must be positive");
    const int d = m.dim;
    detail::MetricJet J = detail::jet(m, x, opt.step);
    if (opt.richardson) J = detail::richardson(J, detail::jet(m, x, opt.step / 2));

    Curvature C;
    C.x = x;
    C.g = J.g;
    C.ginv = detail::checked_inverse(J.g, m.label);
    const Mat& gi = C.ginv;
    auto dg = [&](int l, int i, int j) { return J.dg[static_cast<std::size_t>(l)](i, j); };
    auto ddg = [&](int l, int mm, int i, int j) { return J.ddg[static_cast<std::size_t>(l * d + mm)](i, j); };

    // lower(l, i, j) = Gamma_{l,ij}
    Tensor3 lower(d);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) lower(l, i, j) = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));

    C.gamma = Tensor3(d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int l = 0; l < d; ++l) s += gi(k, l) * lower(l, i, j);
                C.gamma(k, i, j) = s;
            }

    // dgamma(m, k, i, j) = d_m Gamma^k_ij
    Tensor4 dgamma(d);
    for (int mm = 0; mm < d; ++mm) {
        const Mat dginv = -gi * J.dg[static_cast<std::size_t>(mm)] * gi;
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < d; ++l) {
                        const double dlow = 0.5 * (ddg(mm, i, j, l) + ddg(mm, j, i, l) - ddg(mm, l, i, j));
                        s += dginv(k, l) * lower(l, i, j) + gi(k, l) * dlow;
                    }
                    dgamma(mm, k, i, j) = s;
                }
    }

    C.riemann = Tensor4(d);
    const Tensor3& G = C.gamma;
    for (int rho = 0; rho < d; ++rho)
        for (int sg = 0; sg < d; ++sg)
            for (int mu = 0; mu < d; ++mu)
                for (int nu = 0; nu < d; ++nu) {
                    double s = dgamma(mu, rho, nu, sg) - dgamma(nu, rho, mu, sg);
                    for (int lam = 0; lam < d; ++lam)
                        s += G(rho, mu, lam) * G(lam, nu, sg) - G(rho, nu, lam) * G(lam, mu, sg);
                    C.riemann(rho, sg, mu, nu) = s;
                }

    C.ricci_raw = Mat::Zero(d, d);
    for (int sg = 0; sg < d; ++sg)
        for (int nu = 0; nu < d; ++nu)
            for (int rho = 0; rho < d; ++rho) C.ricci_raw(sg, nu) += C.riemann(rho, sg, rho, nu);
    C.asymmetry = (C.ricci_raw - C.ricci_raw.transpose()).cwiseAbs().maxCoeff();
    C.ricci = 0.5 * (C.ricci_raw + C.ricci_raw.transpose());
    return C;
}

inline Tensor3 christoffel(const ChartMetric& m, const Vec& x, double step = 1e-3) {
    return curvature(m, x, {step, true}).gamma;
}

inline Mat ricci(const ChartMetric& m, const Vec& x, const Options& opt = {}) { return curvature(m, x, opt).ricci; }

/// Largest |V^T g V - I| entry.
inline double orthonormality_defect(const Mat& g, const Mat& V) {
    return (V.transpose() * g * V - Mat::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
}

inline Mat frame_ricci(const ChartMetric& m, const FrameAtPoint& fr, const Options& opt = {}) {
    validate_point(m, fr.x);
    if (fr.V.rows() != m.dim || fr.V.cols() != m.dim) throw SpecError("frame has wrong shape");
    const Mat g = detail::eval_checked(m, fr.x);
    const double defect = orthonormality_defect(g, fr.V);
    if (defect > 1e-8) {
        std::ostringstream os;
        os << "frame is not orthonormal (max |V^T g V - I| = " << defect << ")";
        throw SpecError(os.str());
    }
    const Mat R = ricci(m, fr.x, opt);
    const Mat out = fr.V.transpose() * R * fr.V;
    return 0.5 * (out + out.transpose());
}

/// An orthonormal frame obtained from the coordinate basis by Gram-Schmidt.
inline FrameAtPoint gram_schmidt_frame(const ChartMetric& m, const Vec& x) {
    const Mat g = detail::eval_checked(m, x);
    const Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw SingularMetricError("metric is not positive definite");
    const Mat L = llt.matrixL();
    Mat V = L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(m.dim, m.dim));
    return {x, V};
}

/// Sectional curvature of the plane spanned by u, v.
inline double sectional(const Curvature& C, const Vec& u, const Vec& v) {
    const int d = static_cast<int>(C.g.rows());
    const double uu = u.dot(C.g * u);
    const double vv = v.dot(C.g * v);
    const double uv = u.dot(C.g * v);
    const double den = uu * vv - uv * uv;
    if (den < 1e-12) throw SpecError("degenerate plane in sectional curvature");
    // R(u,v)v
    Vec w = Vec::Zero(d);
    for (int rho = 0; rho < d; ++rho)
        for (int sg = 0; sg < d; ++sg)
            for (int mu = 0; mu < d; ++mu)
                for (int nu = 0; nu < d; ++nu) w(rho) += C.riemann(rho, sg, mu, nu) * u(mu) * v(nu) * v(sg);
    return u.dot(C.g * w) / den;
}

inline double sectional(const ChartMetric& m, const Vec& x, const Vec& u, const Vec& v, const Options& opt = {}) {
    return sectional(curvature(m, x, opt), u, v);
}

// ---------------------------------------------------------------------------
// Presets

inline ChartMetric euclidean(int d) {
    return {d, [d](const Vec&) { return Mat(Mat::Identity(d, d)); }, [](const Vec&) { return true; },
            "euclidean:" + std::to_string(d)};
}

/// Round sphere of radius a in the stereographic chart, |x| <= 2.
inline ChartMetric sphere(int d, double a) {
    std::ostringstream label;
    label << "sphere:" << d << ":" << a;
    return {d,
            [d, a](const Vec& x) {
                const double s = 1.0 + x.squaredNorm();
                return Mat(Mat::Identity(d, d) * (4.0 * a * a / (s * s)));
            },
            [](const Vec& x) { return x.norm() <= 2.0 + 1e-9; }, label.str()};
}

/// Upper half-plane model of the hyperbolic plane, coordinates (x, y).
inline ChartMetric hyperbolic2() {
    return {2,
            [](const Vec& x) { return Mat(Mat::Identity(2, 2) / (x(1) * x(1))); },
            [](const Vec& x) { return x(1) > 0.0; }, "hyperbolic2"};
}

/// Left-invariant metric making X_i / lambda_i orthonormal on a group chart.
inline ChartMetric left_invariant(const lie::GroupChart& G, const Vec& lambda) {
    const Mat L2 = lambda.array().square().matrix().asDiagonal();
    std::ostringstream label;
    label << G.name << "-left-invariant";
    for (int i = 0; i < lambda.size(); ++i) label << ":" << lambda(i);
    return {G.dim,
            [G, L2](const Vec& x) {
                const Mat S = G.coframe(x);
                return Mat(S.transpose() * L2 * S);
            },
            G.domain, label.str()};
}

/// The left-invariant frame X_i / lambda_i at x.
inline FrameAtPoint left_invariant_frame(const lie::GroupChart& G, const Vec& lambda, const Vec& x) {
    Mat V = G.coframe(x).inverse();
    for (int i = 0; i < lambda.size(); ++i) V.col(i) /= lambda(i);
    return {x, V};
}

/// A named chart with a few interior sample points and, where known, the
/// constant sectional curvature.
struct Preset {
    ChartMetric metric;
    std::vector<Vec> points;
    std::optional<double> kappa;
    std::optional<lie::GroupChart> group;
    Vec lambda;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SpecError("bad " + what + " '" + s + "'");
    }
}

inline std::vector<Vec> spread_points(int d, double radius) {
    std::vector<Vec> pts;
    pts.push_back(Vec::Constant(d, 0.1 * radius));
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = radius * (i % 2 == 0 ? 0.5 : -0.35) / std::sqrt(static_cast<double>(d));
    pts.push_back(v);
    for (int i = 0; i < d; ++i) v(i) = radius * 0.9 * std::cos(1.0 + i) / std::sqrt(static_cast<double>(d));
    pts.push_back(v);
    return pts;
}

}  // namespace detail

/// Registry: "euclidean:d", "sphere:d:a", "hyperbolic2", "s3-left-invariant:l1:l2:l3".
inline Preset preset(const std::string& name) {
    const auto parts = detail::split(name, ':');
    const std::string& kind = parts[0];
    auto dim_of = [&](const std::string& s) {
        const double v = detail::to_number(s, "dimension");
        if (v != std::floor(v) || v < 1 || v > kMaxDim)
            throw SpecError("dimension must be an integer in [1, " + std::to_string(kMaxDim) + "]");
        return static_cast<int>(v);
    };
    if (kind == "euclidean" && parts.size() == 2) {
        const int d = dim_of(parts[1]);
        return {euclidean(d), detail::spread_points(d, 3.0), 0.0, std::nullopt, {}};
    }
    if (kind == "sphere" && parts.size() == 3) {
        const int d = dim_of(parts[1]);
        const double a = detail::to_number(parts[2], "radius");
        if (!(a > 0)) throw SpecError("sphere radius must be positive");
        return {sphere(d, a), detail::spread_points(d, 1.5), 1.0 / (a * a), std::nullopt, {}};
    }
    if (kind == "hyperbolic2" && parts.size() == 1) {
        std::vector<Vec> pts;
        for (auto [x, y] : {std::pair{0.0, 1.0}, {0.5, 2.0}, {-1.0, 0.5}}) {
            Vec p(2);
            p << x, y;
            pts.push_back(p);
        }
        return {hyperbolic2(), pts, -1.0, std::nullopt, {}};
    }
    if (kind == "s3-left-invariant" && parts.size() == 4) {
        Vec lambda(3);
        for (int i = 0; i < 3; ++i) {
            lambda(i) = detail::to_number(parts[static_cast<std::size_t>(i + 1)], "scale");
            if (!(lambda(i) > 0)) throw SpecError("left-invariant scales must be positive");
        }
        const auto G = lie::s3_chart();
        std::vector<Vec> pts{G.base_point};
        Vec p(3);
        p << -0.8, 0.5, 1.1;
        pts.push_back(p);
        std::optional<double> kappa;
        if (lambda(0) == 1 && lambda(1) == 1 && lambda(2) == 1) kappa = 1.0;
        return {left_invariant(G, lambda), pts, kappa, G, lambda};
    }
    if (kind == "warped") throw SpecError("the 'warped' chart is built from a warped spec, not by name");
    throw SpecError("unknown preset '" + name + "'");
}

}  // namespace ricci_forge::oracle
