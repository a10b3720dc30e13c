#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <ricci_forge/positivity.hpp>

namespace ex = ricci_forge::exprs;
namespace pos = ricci_forge::positivity;
namespace wp = ricci_forge::warped;

namespace {

wp::WarpedFamilySpec profile_spec(const std::vector<double>& mi) {
    wp::WarpedFamilySpec s;
    s.n = static_cast<int>(mi.size());
    s.f = pos::reference_profiles().f;
    for (double m : mi) s.h.push_back(pos::h_power(m));
    return s;
}

}  // namespace

TEST(Profiles, Values) {
    const auto P = pos::reference_profiles();
    EXPECT_DOUBLE_EQ(ex::eval(P.h, 1.0), 0.5);
    EXPECT_NEAR(ex::eval(P.f, 1.0), std::pow(2.0, -0.25), 1e-15);
    EXPECT_DOUBLE_EQ(ex::eval(ex::diff(P.f, 1), 0.0), 1.0);
    EXPECT_TRUE(wp::smoothness_check(profile_spec({1, 0.5}), 1e-9).pass());
}

TEST(AuxInequality, FrozenHighPrecisionValues) {
    // 50-digit reference values of f^{-2}(1-f'^2) - h^2(3/2+r^2).
    EXPECT_NEAR(pos::aux_gap(1e-6), 6.249999999990625e-13, 1e-25);
    EXPECT_NEAR(pos::aux_gap(1e-3), 6.2499906250121093603e-7, 1e-19);
    EXPECT_NEAR(pos::aux_gap(0.03), 0.00056174150680824792897, 1e-16);
    EXPECT_NEAR(pos::aux_gap(0.0316), 0.0006231664023073024406, 1e-16);
    EXPECT_NEAR(pos::aux_gap(1.0), 0.2267135623730950488, 1e-15);
    EXPECT_NEAR(pos::aux_gap(100.0), 0.0098754999877505749684, 1e-15);
}

TEST(AuxInequality, HoldsOnLogGrid) {
    for (int k = 0; k < 10000; ++k) {
        const double r = std::pow(10.0, -6.0 + 9.0 * k / 9999);
        ASSERT_GE(pos::aux_gap(r), -1e-12) << r;
    }
}

TEST(AuxInequality, AgreesWithExpressionPathAwayFromZero) {
    const auto P = pos::reference_profiles();
    const ex::Profile F(P.f);
    for (double r : {0.05, 0.3, 1.0, 4.0, 30.0}) {
        const auto v = F.at(r);
        EXPECT_NEAR(pos::aux_lhs(r), (1 - v.d1 * v.d1) / (v.v * v.v), 1e-10 * (1 + 1 / (r * r)));
    }
}

TEST(Diagonal, ClosedFormMatchesWarpedModule) {
    const std::vector<double> mi{1, 0.5, 2};
    const wp::WarpedFamily fam(profile_spec(mi));
    const double c = 0.7;
    for (double r : {0.05, 0.4, 1.0, 3.0, 25.0}) {
        for (long p : {2L, 7L, 300L}) {
            const auto s = fam.sample(r);
            const wp::Mat base = -c / std::pow(1 + r * r, 2) * wp::Mat::Identity(3, 3);
            const auto exact = fam.ricci(s, base, static_cast<int>(p));
            const auto closed = pos::worst_case_blocks(pos::affine_diagonal(r, c, mi), p);
            const double scale = 1 + std::abs(exact.uu) + std::abs(exact.rr) + p / (r * r) * 1e-6;
            EXPECT_NEAR(closed.rr, exact.rr, 1e-10 * scale);
            EXPECT_NEAR(closed.uu, exact.uu, 1e-10 * scale);
            for (int i = 0; i < 3; ++i) EXPECT_NEAR(closed.yy(i, i), exact.yy(i, i), 1e-10 * scale);
        }
    }
}

TEST(Coefficients, PositiveAndLinearInC) {
    const auto a = pos::derive_coefficients(1, 0.0, {1});
    const auto b = pos::derive_coefficients(1, 2.0, {1});
    for (const auto* c : {&a.rr, &a.uu, &a.y[0]}) {
        EXPECT_GT(c->K, 0);
        EXPECT_GT(c->R, 0);
    }
    EXPECT_EQ(a.y[0].K, b.y[0].K);
    EXPECT_EQ(a.y[0].R, b.y[0].R);
    EXPECT_EQ(b.y[0].S - a.y[0].S, 2.0);
    const auto twice = pos::derive_coefficients(1, 4.0, {1});
    EXPECT_EQ(twice.y[0].S - a.y[0].S, 2 * (b.y[0].S - a.y[0].S));
    for (long p = 2; p < 50; ++p) EXPECT_GE(p * a.uu.K - a.uu.L, 0.0);
    EXPECT_THROW(pos::derive_coefficients(1, 0.0, {0}), ricci_forge::SpecError);
    EXPECT_THROW(pos::derive_coefficients(2, 0.0, {1}), ricci_forge::SpecError);
}

TEST(Coefficients, BoundsAreSound) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> logr(-6.0, 3.0);
    std::uniform_int_distribution<long> pick_p(2, 1000);
    for (const auto& [n, c, mi] : {std::tuple{1, 0.0, std::vector<double>{1}},
                                   std::tuple{2, 1.0, std::vector<double>{1, 0.5}},
                                   std::tuple{3, 0.3, std::vector<double>{2, 1, 0.25}}}) {
        const auto pc = pos::derive_coefficients(n, c, mi);
        // Several directions meet their bound with equality; allow relative rounding.
        auto slack = [](double b) { return 1e-12 * std::max(1.0, std::abs(b)); };
        for (int k = 0; k < 10000 / 3; ++k) {
            const double r = std::pow(10.0, logr(rng));
            const long p = pick_p(rng);
            const auto d = pos::affine_diagonal(r, c, mi);
            const double pp = static_cast<double>(p);
            ASSERT_GE(d.rr_a + pp * d.rr_b, pc.rr.bound(r, pp) - slack(pc.rr.bound(r, pp))) << r << " " << p;
            ASSERT_GE(d.uu_a + pp * d.uu_b, pc.uu.bound(r, pp) - slack(pc.uu.bound(r, pp))) << r << " " << p;
            for (int i = 0; i < n; ++i) {
                const auto I = static_cast<std::size_t>(i);
                const double y = d.y_a[I] + pp * d.y_b[I] - (n - 1) * c * d.h2;
                ASSERT_GE(y, pc.y[I].bound(r, pp) - slack(pc.y[I].bound(r, pp))) << r << " " << p;
            }
        }
    }
}

TEST(KBound, FrozenValuesAndMonotonicity) {
    EXPECT_EQ(pos::k_bound(1, 0, 1), 25.0);
    EXPECT_EQ(pos::k_bound(2, 0, 1), 49.0);
    EXPECT_EQ(pos::k_bound(3, 0, 1), 73.0);
    for (int n = 1; n <= 4; ++n)
        for (double c : {0.0, 1.0, 10.0}) {
            EXPECT_LE(pos::k_bound(n, c, 1), pos::k_bound(n + 1, c, 1));
            EXPECT_LE(pos::k_bound(n, c, 1), pos::k_bound(n, c + 1, 1));
            EXPECT_LE(pos::k_bound(n, 0, 1), pos::k_bound(n, 0, 2));
        }
    // With c > 0 the Y-direction ratio n c / (2m) decreases in m.
    EXPECT_GT(pos::k_bound(1, 1000, 0.5), pos::k_bound(1, 1000, 1));
    EXPECT_GE(pos::k_bound_range(2, 1000, 0.5, 1), pos::k_bound(2, 1000, 0.5));
    EXPECT_GE(pos::k_bound_range(2, 1000, 0.5, 1), pos::k_bound(2, 1000, 1));
    EXPECT_THROW(pos::k_bound(1, 0, 0), ricci_forge::SpecError);
    EXPECT_EQ(pos::p_from_k(25.0), 26);
    EXPECT_EQ(pos::p_from_k(0.5), 2);
}

TEST(MinP, FrozenAndConsistent) {
    const auto a = pos::min_p(1, 0, {1});
    ASSERT_TRUE(a.p_star);
    EXPECT_EQ(*a.p_star, 25);
    ASSERT_TRUE(a.below);
    EXPECT_FALSE(a.below->pass);
    EXPECT_TRUE(a.at_p_star.pass);
    const auto b = pos::min_p(2, 0, {1, 1});
    ASSERT_TRUE(b.p_star);
    EXPECT_EQ(*b.p_star, 49);
}

TEST(MinP, ZeroExponentNeverWorks) {
    EXPECT_FALSE(pos::min_p(1, 0, {0}).p_star);
    EXPECT_FALSE(pos::min_p(2, 0, {1, 0}).p_star);
}

TEST(MinP, GridPolicy) {
    const auto rs = pos::GridSpec{}.radii();
    EXPECT_EQ(rs.size(), 1000U);
    EXPECT_DOUBLE_EQ(rs.front(), 1e-6);
    EXPECT_DOUBLE_EQ(rs.back(), 50.0);
    EXPECT_TRUE(std::is_sorted(rs.begin(), rs.end()));
    EXPECT_THROW((pos::GridSpec{10.0, 1000}.radii()), ricci_forge::SpecError);
    EXPECT_THROW((pos::GridSpec{50.0, 10}.radii()), ricci_forge::SpecError);
}

TEST(MinP, PredicateMonotoneInP) {
    const pos::GridPredicate pred(2, 1.0, {1, 0.5}, {});
    bool seen = false;
    for (long p = 2; p < 120; ++p) {
        const bool ok = pred(p).pass;
        if (seen) {
            EXPECT_TRUE(ok) << p;
        }
        seen = seen || ok;
    }
    EXPECT_TRUE(seen);
}

TEST(MinP, KBoundPassesOnFineGrid) {
    const long p = pos::p_from_k(pos::k_bound(1, 0, 1));
    EXPECT_TRUE(pos::GridPredicate(1, 0, {1}, {50.0, 10000})(p).pass);
}
