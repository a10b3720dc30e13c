#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <ricci_forge/oracle.hpp>

namespace orc = ricci_forge::oracle;
namespace lie = ricci_forge::lie;
using orc::Mat;
using orc::Vec;

namespace {

Vec point(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// Round unit 2-sphere in polar coordinates (theta, phi).
orc::ChartMetric polar_sphere() {
    return {2,
            [](const Vec& x) {
                Mat g = Mat::Zero(2, 2);
                g(0, 0) = 1.0;
                g(1, 1) = std::sin(x(0)) * std::sin(x(0));
                return g;
            },
            [](const Vec& x) { return x(0) > 0 && x(0) < std::numbers::pi; }, "polar-sphere"};
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Christoffel, EuclideanVanishes) {
    const auto G = orc::christoffel(orc::euclidean(3), point({1, -2, 0.5}));
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) EXPECT_EQ(G(k, i, j), 0.0);
}

TEST(Christoffel, HalfPlane) {
    const auto G = orc::christoffel(orc::hyperbolic2(), point({0, 1}));
    // x = 0, y = 1
    EXPECT_NEAR(G(0, 0, 1), -1.0, 1e-9);
    EXPECT_NEAR(G(0, 1, 0), -1.0, 1e-9);
    EXPECT_NEAR(G(1, 0, 0), 1.0, 1e-9);
    EXPECT_NEAR(G(1, 1, 1), -1.0, 1e-9);
    EXPECT_NEAR(G(0, 0, 0), 0.0, 1e-9);
    EXPECT_NEAR(G(0, 1, 1), 0.0, 1e-9);
    EXPECT_NEAR(G(1, 0, 1), 0.0, 1e-9);
}

TEST(Christoffel, PolarSphere) {
    const auto G = orc::christoffel(polar_sphere(), point({std::numbers::pi / 3, 0.2}));
    EXPECT_NEAR(G(0, 1, 1), -std::sqrt(3.0) / 4, 1e-9);
    EXPECT_NEAR(G(1, 0, 1), 1.0 / std::sqrt(3.0), 1e-9);
}

TEST(Ricci, ConstantCurvatureCharts) {
    EXPECT_LE(max_abs(orc::ricci(orc::euclidean(4), point({1, 2, 3, 4}))), 1e-8);
    for (int d = 2; d <= 5; ++d)
        for (double a : {1.0, 2.0}) {
            const auto P = orc::preset("sphere:" + std::to_string(d) + ":" + std::to_string(a));
            for (const auto& x : P.points) {
                const Mat R = orc::ricci(P.metric, x);
                const Mat expect = (d - 1) / (a * a) * P.metric.g(x);
                EXPECT_LE(max_abs(R - expect), 1e-6) << P.metric.label;
            }
        }
    EXPECT_LE(max_abs(orc::ricci(orc::hyperbolic2(), point({0, 1})) + Mat::Identity(2, 2)), 1e-7);
}

TEST(Ricci, AsymmetryIsSmallOnPresets) {
    for (const char* name : {"euclidean:3", "sphere:3:1", "sphere:4:2", "hyperbolic2", "s3-left-invariant:0.5:1:1.5"}) {
        const auto P = orc::preset(name);
        for (const auto& x : P.points) EXPECT_LE(orc::curvature(P.metric, x).asymmetry, 1e-7) << name;
    }
}

TEST(Ricci, MeshRefinementIsFourthOrder) {
    const auto S = orc::sphere(2, 1.0);
    const Vec x = point({0.3, -0.2});
    const Mat exact = S.g(x);
    const double coarse = max_abs(orc::ricci(S, x, {0.2, false}) - exact);
    const double fine = max_abs(orc::ricci(S, x, {0.1, false}) - exact);
    EXPECT_GE(coarse / fine, 4.0);
    EXPECT_GT(coarse, 1e-6);
}

TEST(FrameRicci, UnitSpherePolarFrame) {
    const double th = std::numbers::pi / 3;
    Mat V = Mat::Zero(2, 2);
    V(0, 0) = 1.0;
    V(1, 1) = 1.0 / std::sin(th);
    const Mat R = orc::frame_ricci(polar_sphere(), {point({th, 0.4}), V});
    EXPECT_LE(max_abs(R - Mat::Identity(2, 2)), 1e-7);
}

TEST(FrameRicci, ConstantCurvatureIsScalarIdentity) {
    for (const char* name : {"euclidean:5", "sphere:3:1", "sphere:5:1", "hyperbolic2"}) {
        const auto P = orc::preset(name);
        const int d = P.metric.dim;
        for (const auto& x : P.points) {
            const Mat R = orc::frame_ricci(P.metric, orc::gram_schmidt_frame(P.metric, x));
            EXPECT_LE(max_abs(R - *P.kappa * (d - 1) * Mat::Identity(d, d)), 1e-6) << name;
        }
    }
}

TEST(FrameRicci, RejectsNonOrthonormalFrame) {
    const auto S = orc::sphere(2, 1.0);
    EXPECT_THROW(orc::frame_ricci(S, {point({0.1, 0.1}), Mat::Identity(2, 2)}), ricci_forge::SpecError);
}

TEST(Errors, SingularAndOutOfDomain) {
    const orc::ChartMetric degenerate{2, [](const Vec&) { return Mat(Mat::Zero(2, 2)); },
                                      [](const Vec&) { return true; }, "zero"};
    EXPECT_THROW(orc::ricci(degenerate, point({0, 0})), ricci_forge::SingularMetricError);
    const orc::ChartMetric stretched{2,
                                     [](const Vec&) {
                                         Mat g = Mat::Identity(2, 2);
                                         g(1, 1) = 1e-13;
                                         return g;
                                     },
                                     [](const Vec&) { return true; }, "stretched"};
    EXPECT_THROW(orc::ricci(stretched, point({0, 0})), ricci_forge::SingularMetricError);
    EXPECT_THROW(orc::ricci(orc::hyperbolic2(), point({0, 0.001})), ricci_forge::DomainError);
    EXPECT_THROW(orc::ricci(orc::euclidean(9), Vec::Zero(9)), ricci_forge::SpecError);
    EXPECT_THROW(orc::preset("torus:2"), ricci_forge::SpecError);
}

TEST(Sectional, ConstantCurvature) {
    const Vec u = point({1, 0.3});
    const Vec v = point({-0.2, 1});
    EXPECT_NEAR(orc::sectional(orc::euclidean(2), point({0.5, 0.5}), u, v), 0.0, 1e-9);
    EXPECT_NEAR(orc::sectional(orc::sphere(2, 2.0), point({0.3, -0.7}), u, v), 0.25, 1e-7);
    EXPECT_NEAR(orc::sectional(orc::hyperbolic2(), point({0.3, 1.5}), u, v), -1.0, 1e-7);
    EXPECT_THROW(orc::sectional(orc::euclidean(2), point({0, 0}), u, 2 * u), ricci_forge::SpecError);
}

TEST(LeftInvariant, RoundS3FromQuaternionChart) {
    const auto G = lie::s3_chart();
    const Vec one = Vec::Ones(3);
    const auto M = orc::left_invariant(G, one);
    const Vec x = G.base_point;
    const auto fr = orc::left_invariant_frame(G, one, x);
    EXPECT_LE(orc::orthonormality_defect(M.g(x), fr.V), 1e-12);
    EXPECT_LE(max_abs(orc::frame_ricci(M, fr) - 2 * Mat::Identity(3, 3)), 1e-6);
}

TEST(LeftInvariant, StructureConstantFormulaMatchesChart) {
    for (const auto& G : {lie::s3_chart(), lie::affine2_chart()}) {
        Vec lambda(G.dim);
        for (int i = 0; i < G.dim; ++i) lambda(i) = 0.6 + 0.45 * i;
        const auto M = orc::left_invariant(G, lambda);
        const Mat oracle = orc::frame_ricci(M, orc::left_invariant_frame(G, lambda, G.base_point));
        const Mat closed = lie::left_invariant_ricci(G.structure, lambda);
        EXPECT_LE(max_abs(oracle - closed), 1e-6) << G.name << "\n" << oracle << "\n" << closed;
    }
}

TEST(LeftInvariant, BergerSphereFrozenValues) {
    // Berger sphere with fiber length t: Ric(e1,e1) = 2t^2, Ric(e2,e2) = Ric(e3,e3) = 4 - 2t^2.
    for (double t : {1.0, 0.5, 0.25}) {
        Vec lambda(3);
        lambda << t, 1, 1;
        const Mat R = lie::left_invariant_ricci(lie::s3_chart().structure, lambda);
        Mat expect = Mat::Zero(3, 3);
        expect.diagonal() << 2 * t * t, 4 - 2 * t * t, 4 - 2 * t * t;
        EXPECT_LE(max_abs(R - expect), 1e-12);
    }
}
