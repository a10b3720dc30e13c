#pragma once

// Positive Ricci curvature on E x R^p for the profiles
//   f(r) = r (1+r^2)^(-1/4),  h(r) = (1+r^2)^(-1),  h_i = h^{m_i},
// when E carries worst-case data of class M_2(c, m): base Ricci -c h^2 on the
// diagonal and off-diagonal entries of size up to c h^2.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "exprs.hpp"
#include "parallel.hpp"
#include "warped.hpp"

namespace ricci_forge::positivity {

struct Profiles {
    exprs::Expr f;
    exprs::Expr h;
};

inline Profiles reference_profiles() { return {exprs::parse("r*(1+r^2)^(-1/4)"), exprs::parse("(1+r^2)^(-1)")}; }

/// h^m as an expression, with m converted to the nearest short decimal rational.
inline exprs::Expr h_power(double m) {
    return exprs::pow(reference_profiles().h, rational_from_double(m));
}

/// Bound Ric >= h^2 (r^2 (pK - L) + pR - S) for one frame direction.
struct Coeffs {
    double K = 0, L = 0, R = 0, S = 0;

    double threshold() const { return std::max(L / K, S / R); }
    double bound(double r, double p) const {
        const double h = 1.0 / (1.0 + r * r);
        return h * h * (r * r * (p * K - L) + p * R - S);
    }
};

struct PositivityCoefficients {
    Coeffs rr;
    Coeffs uu;
    std::vector<Coeffs> y;

    /// Any p > k makes every bound positive for all r > 0.
    double k() const {
        double k = std::max(rr.threshold(), uu.threshold());
        for (const auto& c : y) k = std::max(k, c.threshold());
        return k;
    }
};

inline void check_exponents(int n, const std::vector<double>& mi, bool allow_zero) {
    if (n < 0) throw SpecError("n must be nonnegative");
    if (static_cast<int>(mi.size()) != n)
        throw SpecError("expected " + std::to_string(n) + " exponents m_i, got " + std::to_string(mi.size()));
    for (double m : mi) {
        if (!std::isfinite(m) || m < 0) throw SpecError("exponents m_i must be finite and nonnegative");
        if (!allow_zero && m == 0) throw SpecError("all exponents m_i must be positive");
    }
}

inline PositivityCoefficients derive_coefficients(int n, double c, const std::vector<double>& mi) {
    check_exponents(n, mi, false);
    if (!(c >= 0)) throw SpecError("c must be nonnegative");
    double M = 0.0;
    double quad = 0.0;
    for (double m : mi) {
        M += m;
        quad += 4 * m * m + 2 * m;
    }
    PositivityCoefficients pc;
    pc.rr = {0.25, 0.25 + quad, 1.5, 1.5 - 2 * M};
    pc.uu = {1.0, 1.75 - M, 1.5, 1.5 - 2 * M};
    for (double m : mi) pc.y.push_back({m, 3 * m + 4 * m * M, 2 * m, n * c});
    return pc;
}

/// k for n directions that all share the exponent m.
inline double k_bound(int n, double c, double m) {
    if (!(m > 0)) throw SpecError("m must be positive");
    return derive_coefficients(n, c, std::vector<double>(static_cast<std::size_t>(n), m)).k();
}

/// k valid for every choice of exponents m_i in [m_lo, m_hi].
inline double k_bound_range(int n, double c, double m_lo, double m_hi) {
    if (!(m_lo > 0) || m_hi < m_lo) throw SpecError("need 0 < m_lo <= m_hi");
    if (!(c >= 0)) throw SpecError("c must be nonnegative");
    const double rr = std::max(1 + 4 * n * (4 * m_hi * m_hi + 2 * m_hi), 1 - 4.0 * n * m_lo / 3);
    const double uu = std::max(1.75 - n * m_lo, 1 - 4.0 * n * m_lo / 3);
    const double y = n == 0 ? 0.0 : std::max(3 + 4.0 * n * m_hi, n * c / (2 * m_lo));
    return std::max({rr, uu, y});
}

/// Smallest integer p >= 2 with p > k.
inline long p_from_k(double k) { return std::max(2L, static_cast<long>(std::floor(k)) + 1); }

// ---------------------------------------------------------------------------
// Stable closed-form evaluation along the profiles

/// f^{-2}(1 - f'^2) without cancellation near r = 0.
inline double aux_lhs(double r) {
    const double u = r * r;
    const double h = 1.0 / (1.0 + u);
    const double num = std::expm1(2.5 * std::log1p(u)) - u - 0.25 * u * u;
    return h * h * num / u;
}

/// f^{-2}(1 - f'^2) - h^2 (3/2 + r^2), which is >= 0 for all r > 0.
inline double aux_gap(double r) {
    const double u = r * r;
    const double h = 1.0 / (1.0 + u);
    // num/u - 3/2 - u with num = (1+u)^{5/2} - 1 - u - u^2/4; series for small u
    double inner;
    if (u < 1e-3) {
        inner = u * (5.0 / 8 + u * (5.0 / 16 + u * (-5.0 / 128 + u * (3.0 / 256 + u * (-5.0 / 1024)))));
    } else {
        inner = (std::expm1(2.5 * std::log1p(u)) - u - 0.25 * u * u) / u - 1.5 - u;
    }
    return h * h * inner;
}

/// The Ricci diagonal along the profiles, affine in p: value(p) = a + p b.
struct AffineDiagonal {
    double r = 0;
    double h2 = 0;  // h^2, the unit of the worst-case base terms
    double rr_a = 0, rr_b = 0;
    double uu_a = 0, uu_b = 0;
    std::vector<double> y_a, y_b;
};

inline AffineDiagonal affine_diagonal(double r, double c, const std::vector<double>& mi) {
    const double u = r * r;
    const double h = 1.0 / (1.0 + u);
    AffineDiagonal d;
    d.r = r;
    d.h2 = h * h;
    const double lf = h * (1 + u / 2) / r;      // f'/f
    const double f2f = -h * h * (1.5 + u / 4);  // f''/f
    const double Q = aux_lhs(r);                // (1 - f'^2)/f^2
    const std::size_t n = mi.size();
    std::vector<double> s(n), hh(n);
    double sum_s = 0, sum_hh = 0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = -2 * mi[i] * r * h;
        hh[i] = h * h * (-2 * mi[i] + (4 * mi[i] * mi[i] + 2 * mi[i]) * u);
        sum_s += s[i];
        sum_hh += hh[i];
    }
    d.rr_a = f2f - sum_hh;
    d.rr_b = -f2f;
    d.uu_a = -2 * Q - lf * sum_s - f2f;
    d.uu_b = Q;
    d.y_a.resize(n);
    d.y_b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.y_a[i] = -c * h * h + lf * s[i] - s[i] * (sum_s - s[i]) - hh[i];
        d.y_b[i] = -lf * s[i];
    }
    return d;
}

/// Blocks at the adversarial base data (diagonal -c h^2, zero off-diagonal;
/// the off-diagonal allowance enters as Gershgorin slack).
inline warped::RicciBlocks worst_case_blocks(const AffineDiagonal& d, long p) {
    const int n = static_cast<int>(d.y_a.size());
    const double pp = static_cast<double>(p);
    warped::RicciBlocks b;
    b.p = static_cast<int>(std::min<long>(p, 1L << 30));
    b.r = d.r;
    b.rr = d.rr_a + pp * d.rr_b;
    b.uu = d.uu_a + pp * d.uu_b;
    b.yy = warped::Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) b.yy(i, i) = d.y_a[static_cast<std::size_t>(i)] + pp * d.y_b[static_cast<std::size_t>(i)];
    b.ry = warped::Vec::Zero(n);
    return b;
}

// ---------------------------------------------------------------------------

struct GridSpec {
    double r_max = 50.0;
    int points = 1000;

    /// Half log-spaced on [1e-6, 1], half uniform on (1, r_max].
    std::vector<double> radii() const {
        if (!(r_max >= 50.0)) throw SpecError("grid r_max must be at least 50");
        if (points < 1000) throw SpecError("grid needs at least 1000 points");
        const int lo = points / 2;
        const int hi = points - lo;
        std::vector<double> rs;
        rs.reserve(static_cast<std::size_t>(points));
        for (int k = 0; k < lo; ++k) rs.push_back(std::pow(10.0, -6.0 + 6.0 * k / (lo - 1)));
        for (int k = 1; k <= hi; ++k) rs.push_back(1.0 + (r_max - 1.0) * k / hi);
        return rs;
    }
};

struct GridVerdict {
    bool pass = false;
    double min_margin = INFINITY;
    double r_at_min = 0.0;
    std::string direction;  // "rr", "uu" or "Y[i]"
};

/// Evaluates the positive-definiteness predicate at p over precomputed samples.
class GridPredicate {
  public:
    GridPredicate(int n, double c, std::vector<double> mi, const GridSpec& grid)
        : c_(c), mi_(std::move(mi)) {
        check_exponents(n, mi_, true);
        if (!(c >= 0)) throw SpecError("c must be nonnegative");
        const auto rs = grid.radii();
        samples_.resize(rs.size());
        parallel_chunks(rs.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) samples_[k] = affine_diagonal(rs[k], c_, mi_);
        });
    }

    GridVerdict operator()(long p) const {
        const std::size_t N = samples_.size();
        std::vector<double> margin(N);
        parallel_chunks(N, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                const auto& s = samples_[k];
                margin[k] = warped::assemble_and_check_pd(worst_case_blocks(s, p), c_ * s.h2).min_eigen;
            }
        });
        GridVerdict v;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < N; ++k)
            if (margin[k] < v.min_margin) {
                v.min_margin = margin[k];
                arg = k;
            }
        v.pass = v.min_margin > 0.0;
        v.r_at_min = samples_[arg].r;
        v.direction = weakest_direction(samples_[arg], p);
        return v;
    }

  private:
    std::string weakest_direction(const AffineDiagonal& s, long p) const {
        const double pp = static_cast<double>(p);
        const std::size_t n = s.y_a.size();
        std::string name = "rr";
        double best = s.rr_a + pp * s.rr_b;
        if (const double u = s.uu_a + pp * s.uu_b; u < best) {
            best = u;
            name = "uu";
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double y = s.y_a[i] + pp * s.y_b[i] - (static_cast<double>(n) - 1) * c_ * s.h2;
            if (y < best) {
                best = y;
                name = "Y[" + std::to_string(i) + "]";
            }
        }
        return name;
    }

    double c_;
    std::vector<double> mi_;
    std::vector<AffineDiagonal> samples_;
};

inline constexpr long kMaxP = 1000000;

struct MinPResult {
    std::optional<long> p_star;
    GridVerdict at_p_star;       // certificate: margin at p_star
    std::optional<GridVerdict> below;  // the failing sweep at p_star - 1
    int sweeps = 0;
};

/// Smallest p >= 2 for which the predicate holds on the whole grid, by
/// exponential then binary search; none when nothing up to 10^6 works.
inline MinPResult min_p(int n, double c, const std::vector<double>& mi, const GridSpec& grid = {}) {
    const GridPredicate pred(n, c, mi, grid);
    MinPResult res;
    auto test = [&](long p) {
        ++res.sweeps;
        return pred(p);
    };
    GridVerdict v = test(2);
    if (v.pass) {
        res.p_star = 2;
        res.at_p_star = v;
        return res;
    }
    long lo = 2;  // fails
    long hi = 4;
    std::optional<GridVerdict> hi_verdict;
    for (;;) {
        v = test(hi);
        if (v.pass) {
            hi_verdict = v;
            break;
        }
        lo = hi;
        if (hi >= kMaxP) return res;
        hi = std::min(2 * hi, kMaxP);
    }
    GridVerdict lo_verdict = test(lo);
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        v = test(mid);
        if (v.pass) {
            hi = mid;
            hi_verdict = v;
        } else {
            lo = mid;
            lo_verdict = v;
        }
    }
    res.p_star = hi;
    res.at_p_star = *hi_verdict;
    res.below = lo_verdict;
    return res;
}

}  // namespace ricci_forge::positivity
