#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <ricci_forge/variation.hpp>

namespace va = ricci_forge::variation;
namespace orc = ricci_forge::oracle;
namespace lie = ricci_forge::lie;
using va::Mat;
using va::Vec;

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

va::SubmersionData flat_bundle(int b, int f) {
    va::SubmersionData d;
    d.dimB = b;
    d.dimF = f;
    d.ricB = Vec::LinSpaced(b, 0.5, 2.0).asDiagonal();
    d.ricF = Vec::LinSpaced(f, 1.0, 3.0).asDiagonal();
    d.aUV = Mat::Zero(f, f);
    d.aXY = Mat::Zero(b, b);
    d.deltaA = Mat::Zero(b, f);
    return d;
}

// Oracle Ricci of the Berger sphere (fiber X_1 scaled by t) in the frame {X_1/t, X_2, X_3}.
Mat berger_oracle(double t) {
    const auto G = lie::s3_chart();
    Vec lambda(3);
    lambda << t, 1, 1;
    return orc::frame_ricci(orc::left_invariant(G, lambda), orc::left_invariant_frame(G, lambda, G.base_point));
}

}  // namespace

TEST(CanonicalVariation, FlatBundle) {
    const auto d = flat_bundle(3, 2);
    for (double t : {1.0, 0.5, 0.01}) {
        const auto s = va::canonical_variation_ricci(d, t);
        EXPECT_LE(max_abs(s.vv - d.ricF / (t * t)), 1e-12);
        EXPECT_EQ(s.hh, d.ricB);
        EXPECT_EQ(max_abs(s.hv), 0.0);
        EXPECT_TRUE(va::error_bound_check(d, 0.0, {t}).pass());
    }
}

TEST(CanonicalVariation, RejectsBadT) {
    const auto d = flat_bundle(1, 1);
    EXPECT_THROW(va::canonical_variation_ricci(d, 0.0), ricci_forge::SpecError);
    EXPECT_THROW(va::canonical_variation_ricci(d, 1.5), ricci_forge::SpecError);
    auto bad = d;
    bad.aXY = Mat::Zero(2, 2);
    EXPECT_THROW(va::canonical_variation_ricci(bad, 0.5), ricci_forge::SpecError);
}

TEST(Hopf, PresetValues) {
    const auto d = va::hopf_preset();
    EXPECT_TRUE(va::invariant_violations(d).empty());
    EXPECT_EQ(d.ricF(0, 0), 0.0);
    EXPECT_NEAR(d.ricB(0, 0), 4.0, 1e-7);
    EXPECT_NEAR(d.ricB(1, 1), 4.0, 1e-7);
    EXPECT_NEAR(d.aUV(0, 0), 2.0, 1e-7);
    EXPECT_LE(max_abs(d.aXY - Mat::Identity(2, 2)), 1e-7);
    EXPECT_LE(max_abs(d.deltaA), 1e-7);
    EXPECT_NEAR(va::derived_error_constant(d), 2.0, 1e-7);
}

TEST(Hopf, UnscaledBlocksGiveRoundS3) {
    const auto s = va::canonical_variation_ricci(va::hopf_preset(), 1.0);
    EXPECT_LE(max_abs(s.assemble() - 2 * Mat::Identity(3, 3)), 1e-5);
}

TEST(Hopf, MatchesBergerSphereOracle) {
    const auto d = va::hopf_preset();
    for (double t : {1.0, 0.5, 0.25}) {
        const auto s = va::canonical_variation_ricci(d, t);
        EXPECT_LE(max_abs(s.assemble() - berger_oracle(t)), 1e-5) << t;
        EXPECT_NEAR(s.vv(0, 0), 2 * t * t, 1e-6);
        EXPECT_NEAR(s.hh(0, 0), 4 - 2 * t * t, 1e-6);
    }
}

TEST(Hopf, ErrorInequalitiesHoldWithDerivedConstant) {
    const auto d = va::hopf_preset();
    const auto rep = va::error_bound_check(d, va::derived_error_constant(d), {1, 0.5, 0.1, 0.01});
    EXPECT_TRUE(rep.pass());
    EXPECT_GE(rep.min_slack, -1e-12);
}

TEST(ErrorBounds, AdversarialConstantIsReported) {
    auto d = flat_bundle(2, 1);
    d.aXY = 3 * Mat::Identity(2, 2);
    const auto rep = va::error_bound_check(d, 1.0, {1.0, 0.5});
    ASSERT_FALSE(rep.pass());
    EXPECT_EQ(rep.violations.front().inequality, "hh-lower");
    EXPECT_EQ(rep.violations.front().t, 1.0);
}

TEST(Invariants, RoundTripIsIdentity) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int b = 1 + trial % 4;
        const int f = 1 + (trial / 4) % 3;
        auto rnd = [&](int r, int c) {
            Mat m(r, c);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) m(i, j) = u(rng);
            return m;
        };
        auto sym = [](Mat m) { return Mat(0.5 * (m + m.transpose())); };
        const Mat vv = sym(rnd(f, f));
        const Mat hh = sym(rnd(b, b));
        const Mat hv = rnd(b, f);
        const Mat rb = sym(rnd(b, b));
        const Mat rf = sym(rnd(f, f));
        va::SubmersionData d{b, f, rb, rf, {}, {}, {}};
        d = va::with_invariants(d, va::a_invariants_from_ricci(vv, hh, hv, rb, rf));
        const auto s = va::canonical_variation_ricci(d, 1.0);
        EXPECT_LE(max_abs(s.vv - vv), 1e-14);
        EXPECT_LE(max_abs(s.hh - hh), 1e-14);
        EXPECT_EQ(s.hv, hv);
    }
}

TEST(Invariants, FlatInputsGiveZero) {
    const Mat rb = Mat::Identity(2, 2);
    const Mat rf = 2 * Mat::Identity(1, 1);
    const auto a = va::a_invariants_from_ricci(rf, rb, Mat::Zero(2, 1), rb, rf);
    EXPECT_EQ(max_abs(a.aUV) + max_abs(a.aXY) + max_abs(a.deltaA), 0.0);
    EXPECT_THROW(va::a_invariants_from_ricci(rf, rb, Mat::Zero(1, 1), rb, rf), ricci_forge::SpecError);
}

TEST(Limits, FlatCircleFiberCollapses) {
    const auto d = va::hopf_preset();
    double prev = INFINITY;
    for (double t : {1e-1, 1e-2, 1e-3}) {
        const double v = va::canonical_variation_ricci(d, t).vv(0, 0);
        EXPECT_NEAR(v, t * t * d.aUV(0, 0), 1e-15);
        EXPECT_LT(v, prev);
        prev = v;
    }
    auto blow = d;
    blow.ricF(0, 0) = 0.5;
    EXPECT_GT(va::canonical_variation_ricci(blow, 1e-3).vv(0, 0), 1e5);
}

TEST(Limits, NonnegativityTransfers) {
    const auto d = va::hopf_preset();
    const double C = va::derived_error_constant(d);
    for (double t : {1.0, 0.3, 0.01}) {
        const auto s = va::canonical_variation_ricci(d, t);
        EXPECT_GE(s.vv.diagonal().minCoeff(), 0.0);
        EXPECT_GE(s.hh.diagonal().minCoeff(), -C * t * t);
    }
}

TEST(Invariants, ViolationsAreListed) {
    auto d = flat_bundle(2, 2);
    d.ricB(0, 1) = d.ricB(1, 0) = 0.1;
    d.aUV = -Mat::Identity(2, 2);
    const auto v = va::invariant_violations(d);
    ASSERT_EQ(v.size(), 2U);
    EXPECT_EQ(v[0], "ricB is not diagonal");
    EXPECT_EQ(v[1], "aUV is not positive semidefinite");
}
