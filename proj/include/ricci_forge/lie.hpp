#pragma once

// Left-invariant frames on small Lie groups: quaternion charts of S^3, the
// affine group of the line, flat tori, and the Ricci tensor of a left-invariant
// diagonal metric computed from structure constants alone.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"

namespace ricci_forge::lie {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Structure constants C^k_ij of a frame: [X_i, X_j] = sum_k C^k_ij X_k.
class StructureConstants {
  public:
    StructureConstants() = default;
    explicit StructureConstants(int n) : n_(n), c_(static_cast<std::size_t>(n * n * n), 0.0) {}

    int dim() const { return n_; }
    double operator()(int i, int j, int k) const { return c_[index(i, j, k)]; }
    /// Sets C^k_ij and its antisymmetric partner C^k_ji.
    void set(int i, int j, int k, double v) {
        c_[index(i, j, k)] = v;
        c_[index(j, i, k)] = -v;
    }
    bool zero() const {
        for (double v : c_)
            if (v != 0.0) return false;
        return true;
    }

  private:
    std::size_t index(int i, int j, int k) const { return static_cast<std::size_t>((i * n_ + j) * n_ + k); }
    int n_ = 0;
    std::vector<double> c_;
};

/// Orthonormal-frame constants c(i,j,k) = <[e_i,e_j],e_k> for e_i = X_i / lambda_i.
inline StructureConstants orthonormal_constants(const StructureConstants& C, const Vec& lambda) {
    const int n = C.dim();
    StructureConstants c(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k) c.set(i, j, k, C(i, j, k) * lambda(k) / (lambda(i) * lambda(j)));
    return c;
}

/// Ricci tensor, in the orthonormal frame e_i = X_i/lambda_i, of the
/// left-invariant metric making e_i orthonormal.
inline Mat left_invariant_ricci(const StructureConstants& C, const Vec& lambda) {
    const int n = C.dim();
    const StructureConstants c = orthonormal_constants(C, lambda);
    // G(i,j,k) = <nabla_{e_i} e_j, e_k>
    std::vector<double> G(static_cast<std::size_t>(n * n * n));
    auto g = [&](int i, int j, int k) -> double& { return G[static_cast<std::size_t>((i * n + j) * n + k)]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) g(i, j, k) = 0.5 * (c(i, j, k) - c(j, k, i) + c(k, i, j));

    // <R(e_a,e_b)e_c, e_d>
    auto riem = [&](int a, int b, int cc, int d) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += g(b, cc, k) * g(a, k, d) - g(a, cc, k) * g(b, k, d) - c(a, b, k) * g(k, cc, d);
        return s;
    };
    Mat ric = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc)
            for (int a = 0; a < n; ++a) ric(b, cc) += riem(a, b, cc, a);
    return 0.5 * (ric + ric.transpose());
}

// ---------------------------------------------------------------------------

struct Quaternion {
    double w = 1, x = 0, y = 0, z = 0;

    friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
        return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
    }
    Quaternion conj() const { return {w, -x, -y, -z}; }

    static Quaternion i() { return {0, 1, 0, 0}; }
    static Quaternion k() { return {0, 0, 0, 1}; }
    static Quaternion exp_i(double t) { return {std::cos(t), std::sin(t), 0, 0}; }
    static Quaternion exp_k(double t) { return {std::cos(t), 0, 0, std::sin(t)}; }
};

/// A chart on an n-dimensional Lie group together with a left-invariant frame.
/// `coframe(x)` is the matrix S with S(i,a) = sigma_i(d/dx_a), sigma the dual coframe,
/// so the X_i have coordinates given by the columns of S^{-1}.
struct GroupChart {
    std::string name;
    int dim = 0;
    std::function<Mat(const Vec&)> coframe;
    std::function<bool(const Vec&)> domain;
    Vec base_point;
    StructureConstants structure;
};

inline GroupChart flat_chart(int n) {
    GroupChart g;
    g.name = "flat";
    g.dim = n;
    g.coframe = [n](const Vec&) { return Mat::Identity(n, n); };
    g.domain = [](const Vec&) { return true; };
    g.base_point = Vec::Constant(n, 0.3);
    g.structure = StructureConstants(n);
    return g;
}

/// S^3 as unit quaternions q = exp(k a) exp(i b) exp(k c); X_1, X_2, X_3 are the
/// left-invariant fields q i, q j, q k, so [X_1,X_2] = 2 X_3 cyclically.
inline GroupChart s3_chart() {
    GroupChart g;
    g.name = "s3";
    g.dim = 3;
    g.coframe = [](const Vec& x) {
        using Q = Quaternion;
        const Q B = Q::exp_i(x(1));
        const Q C = Q::exp_k(x(2));
        const Q da = C.conj() * B.conj() * Q::k() * B * C;
        const Q db = C.conj() * Q::i() * C;
        const Q dc = Q::k();
        Mat S(3, 3);
        S << da.x, db.x, dc.x, da.y, db.y, dc.y, da.z, db.z, dc.z;
        return S;
    };
    g.domain = [](const Vec& x) { return x(1) > 0.05 && x(1) < std::numbers::pi / 2 - 0.05; };
    g.base_point = Vec(3);
    g.base_point << 0.3, 0.7, 0.4;
    g.structure = StructureConstants(3);
    g.structure.set(0, 1, 2, 2.0);
    g.structure.set(1, 2, 0, 2.0);
    g.structure.set(2, 0, 1, 2.0);
    return g;
}

/// The group of affine maps of the line in coordinates (x, y), y > 0, with
/// X_1 = y d/dx, X_2 = y d/dy and [X_1, X_2] = -X_1.
inline GroupChart affine2_chart() {
    GroupChart g;
    g.name = "affine2";
    g.dim = 2;
    g.coframe = [](const Vec& x) { return Mat::Identity(2, 2) / x(1); };
    g.domain = [](const Vec& x) { return x(1) > 0.0; };
    g.base_point = Vec(2);
    g.base_point << 0.2, 1.0;
    g.structure = StructureConstants(2);
    g.structure.set(0, 1, 0, -1.0);
    return g;
}

inline GroupChart group_chart(const std::string& name, int n) {
    if (name == "flat") return flat_chart(n);
    if (name == "s3-left-invariant" || name == "s3") {
        if (n != 3) throw SpecError("chart 's3-left-invariant' needs n = 3, got " + std::to_string(n));
        return s3_chart();
    }
    if (name == "affine2") {
        if (n != 2) throw SpecError("chart 'affine2' needs n = 2, got " + std::to_string(n));
        return affine2_chart();
    }
    throw SpecError("unknown chart '" + name + "'");
}

}  // namespace ricci_forge::lie
