#pragma once

// Exact calculus on class certificates M_q(c, m) with sectional curvature
// bounds |K| <= L / t^e, the three variants of the submersion lemma, vector
// bundle lifts, and evaluation of iterated-bundle plans down to a p bound.

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "positivity.hpp"
#include "rational.hpp"

namespace ricci_forge::bundlecalc {

struct CurvatureBound {
    Rational L;  // |K| <= L / t^e
    Rational e;
    friend bool operator==(const CurvatureBound&, const CurvatureBound&) = default;
};

/// A certificate (E, g_t) in M_q(c, m). With every_q set the family can be
/// reparametrized to any q; the stored q is then only a reference value.
struct FamilyParams {
    Rational q{1};
    Rational c{0};
    Rational m{0};
    std::optional<CurvatureBound> curvature;
    int dim = 0;
    std::optional<Rational> a_bound;
    bool every_q = false;

    friend bool operator==(const FamilyParams&, const FamilyParams&) = default;
};

inline std::string describe(const FamilyParams& fp) {
    std::ostringstream os;
    os << "M_" << (fp.every_q ? "every" : fp.q.str()) << "(c=" << fp.c << ", m=" << fp.m << ")";
    if (fp.curvature) os << " |K|<=" << fp.curvature->L << "/t^" << fp.curvature->e;
    os << " dim " << fp.dim;
    return os.str();
}

inline void validate(const FamilyParams& fp) {
    if (fp.q <= 0) throw SpecError("q must be positive, got " + fp.q.str());
    if (fp.c < 0) throw SpecError("c must be nonnegative, got " + fp.c.str());
    if (fp.m < 0) throw SpecError("m must be nonnegative, got " + fp.m.str());
    if (fp.dim < 0) throw SpecError("dim must be nonnegative");
    if (fp.curvature && (fp.curvature->L < 0 || fp.curvature->e < 0))
        throw SpecError("curvature bound needs L >= 0 and e >= 0");
    if (fp.a_bound && *fp.a_bound < 0) throw SpecError("aBound must be nonnegative");
}

/// Substitutes t -> t^rho: every exponent scales by rho.
inline FamilyParams reparametrize(FamilyParams fp, const Rational& rho) {
    if (rho <= 0) throw SpecError("reparametrize needs rho > 0, got " + rho.str());
    fp.q *= rho;
    fp.m *= rho;
    if (fp.curvature) fp.curvature->e *= rho;
    return fp;
}

/// Reparametrizes so that the class exponent becomes q_target.
inline FamilyParams reparametrize_to(const FamilyParams& fp, const Rational& q_target) {
    if (q_target <= 0) throw SpecError("target q must be positive, got " + q_target.str());
    return reparametrize(fp, q_target / fp.q);
}

/// Multiplies g_t by t^(2r): M_q(c, m) -> M_{q-2r}(c, m+r), e -> e+2r.
inline FamilyParams rescale(FamilyParams fp, const Rational& r) {
    if (r <= 0 || r * 2 >= fp.q) {
        std::ostringstream os;
        os << "rescale needs 0 < r < q/2, got r = " << r << " with q = " << fp.q;
        throw SpecError(os.str());
    }
    fp.q -= r * 2;
    fp.m += r;
    if (fp.curvature) fp.curvature->e += r * 2;
    return fp;
}

/// Class inclusion a ⊆ b: b is obtained from a by lowering q or raising c, m, L, e.
inline bool implies(const FamilyParams& a, const FamilyParams& b) {
    if (a.dim != b.dim) return false;
    if (!(a.every_q || a.q >= b.q) || a.c > b.c || a.m > b.m) return false;
    if (b.every_q && !a.every_q) return false;
    if (!b.curvature) return true;
    return a.curvature && a.curvature->L <= b.curvature->L && a.curvature->e <= b.curvature->e;
}

struct Relaxation {
    std::optional<Rational> q;
    std::optional<Rational> c;
    std::optional<Rational> m;
};

/// Weakens a certificate without arithmetic; each target must be weaker than
/// the current value.
inline FamilyParams weaken(FamilyParams fp, const Relaxation& to) {
    if (to.q) {
        if (*to.q <= 0 || (!fp.every_q && *to.q > fp.q)) {
            std::ostringstream os;
            os << "weaken cannot raise q from " << fp.q << " to " << *to.q;
            throw SpecError(os.str());
        }
        if (fp.every_q)
            fp = reparametrize_to(fp, *to.q);
        else
            fp.q = *to.q;
        fp.every_q = false;
    }
    if (to.c) {
        if (*to.c < fp.c) throw SpecError("weaken cannot lower c from " + fp.c.str() + " to " + to.c->str());
        fp.c = *to.c;
    }
    if (to.m) {
        if (*to.m < fp.m) throw SpecError("weaken cannot lower m from " + fp.m.str() + " to " + to.m->str());
        fp.m = *to.m;
    }
    return fp;
}

inline FamilyParams weaken(const FamilyParams& fp, const Rational& q) { return weaken(fp, Relaxation{q, {}, {}}); }

// ---------------------------------------------------------------------------
// Constants Q_1..Q_6 of the submersion estimates, as conservative explicit
// choices.

/// |Ric(Y_i, Y_j)| <= q1(d) * max|K| in dimension d.
inline Rational q1(int d) { return max(Rational(1), Rational(2 * (d - 1))); }

/// Submersion error bound factor.
inline Rational q2(int dim_e) { return q1(dim_e) * 2; }

/// Numerator of |K| bounds for the fiber-scaled metric: L_b + 4 dimB^2 L_a + L_f.
inline Rational lambda(const Rational& Lb, int dimB, const Rational& La, const Rational& Lf) {
    return Lb + Rational(4) * Rational(dimB) * Rational(dimB) * La + Lf;
}

enum class Variant { A, B, C };

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::A: return "A";
        case Variant::B: return "B";
        case Variant::C: return "C";
    }
    return "?";
}

inline const CurvatureBound& need_curvature(const FamilyParams& fp, const char* role) {
    if (!fp.curvature) throw SpecError(std::string(role) + " lacks a curvature bound (L, e)");
    return *fp.curvature;
}

/// m-hat = max(b, 2 m_B, f).
inline Rational m_hat(const FamilyParams& base, const FamilyParams& fiber) {
    return max(max(need_curvature(base, "base").e, base.m * 2), need_curvature(fiber, "fiber").e);
}

/// Fiber exponent required by variant A: 2 m-hat + 3 q_B.
inline Rational required_fiber_q(const FamilyParams& base, const FamilyParams& fiber) {
    return m_hat(base, fiber) * 2 + base.q * 3;
}

inline FamilyParams lemma_main_a(const FamilyParams& base, FamilyParams fiber, const Rational& La) {
    validate(base);
    validate(fiber);
    if (La < 0) throw SpecError("La must be nonnegative");
    const Rational mh = m_hat(base, fiber);
    const Rational need = mh * 2 + base.q * 3;
    if (fiber.every_q) fiber = reparametrize_to(fiber, max(need, fiber.q));
    if (fiber.q < need) {
        std::ostringstream os;
        os << "lemma_main(A) precondition r >= 2*m_hat + 3*q fails: r = " << fiber.q << " < " << need
           << " = 2*" << mh << " + 3*" << base.q;
        throw SpecError(os.str());
    }
    const auto& kb = *base.curvature;
    const auto& kf = *fiber.curvature;
    FamilyParams out;
    out.dim = base.dim + fiber.dim;
    out.q = base.q;
    // Fiber directions are scaled by s = t^(m_hat + q).
    out.m = max(base.m, fiber.m + mh + base.q);
    const Rational lam = lambda(kb.L, base.dim, La, kf.L);
    const Rational Q3 = q2(out.dim) * lam;
    out.c = max(base.c + Q3, fiber.c);
    out.curvature = CurvatureBound{lam, mh * 2 + base.q * 2 + kf.e};
    return out;
}

inline FamilyParams lemma_main_b(const FamilyParams& base, FamilyParams fiber, const Rational& La) {
    validate(base);
    validate(fiber);
    if (La < 0) throw SpecError("La must be nonnegative");
    const auto& kb = need_curvature(base, "base");
    const auto& kf = need_curvature(fiber, "fiber");
    if (!kf.L.is_zero()) throw SpecError("lemma_main(B) precondition L_f = 0 fails: L_f = " + kf.L.str());
    if (!kb.e.is_zero()) throw SpecError("lemma_main(B) precondition b = 0 fails: b = " + kb.e.str());
    if (fiber.every_q) fiber = reparametrize_to(fiber, base.q);
    FamilyParams out;
    out.dim = base.dim + fiber.dim;
    out.every_q = true;
    out.q = min(Rational(1), base.q);
    // Fiber directions are scaled by s = t^(2 m_B + 1).
    out.m = max(base.m, fiber.m + base.m * 2 + 1);
    const Rational lamB = lambda(kb.L, base.dim, La, Rational(0));
    out.c = base.c + q2(out.dim) * lamB;
    out.curvature = CurvatureBound{lamB, Rational(0)};
    return out;
}

inline FamilyParams lemma_main_c(const FamilyParams& base, FamilyParams fiber, const Rational& La) {
    validate(base);
    validate(fiber);
    if (!La.is_zero()) throw SpecError("lemma_main(C) precondition La = 0 fails: La = " + La.str());
    const auto& kb = need_curvature(base, "base");
    FamilyParams b = base;
    if (b.every_q && !fiber.every_q) b = reparametrize_to(b, fiber.q);
    if (fiber.every_q) fiber = reparametrize_to(fiber, b.q);
    const auto& kf = need_curvature(fiber, "fiber");
    FamilyParams out;
    out.dim = b.dim + fiber.dim;
    out.every_q = base.every_q && fiber.every_q;
    out.q = min(b.q, fiber.q);
    out.c = max(b.c, fiber.c);
    out.m = max(b.m, fiber.m);
    out.curvature = CurvatureBound{kb.L + kf.L, max(b.curvature->e, kf.e)};
    return out;
}

inline FamilyParams lemma_main(const FamilyParams& base, const FamilyParams& fiber, const Rational& La,
                               Variant v) {
    switch (v) {
        case Variant::A: return lemma_main_a(base, fiber, La);
        case Variant::B: return lemma_main_b(base, fiber, La);
        case Variant::C: return lemma_main_c(base, fiber, La);
    }
    throw SpecError("unknown lemma_main variant");
}

/// Compact Ric >= 0 manifold: M_q(0, 0) for every q, bounded curvature.
inline FamilyParams ricnneg_params(int dim, const Rational& L = Rational(1)) {
    FamilyParams fp;
    fp.dim = dim;
    fp.every_q = true;
    fp.curvature = CurvatureBound{L, Rational(0)};
    validate(fp);
    return fp;
}

/// Nilmanifold of dimension n: M_q(c, 2^(n-2)(q-1) + 1). The curvature
/// exponent defaults to 2m.
inline FamilyParams nilmanifold_params(int n, const Rational& q, const Rational& c,
                                       std::optional<CurvatureBound> curvature = std::nullopt) {
    if (n < 2) throw SpecError("nilmanifold needs n >= 2, got " + std::to_string(n));
    if (q < 1) throw SpecError("nilmanifold needs q >= 1, got " + q.str());
    FamilyParams fp;
    fp.dim = n;
    fp.q = q;
    fp.c = c;
    fp.m = Rational(2).pow(n - 2) * (q - 1) + 1;
    fp.curvature = curvature ? *curvature : CurvatureBound{Rational(1), fp.m * 2};
    validate(fp);
    return fp;
}

/// Total space of a rank-k vector bundle: variant A with the t-independent
/// fiber (O(k) x R^k)/O(k), whose curvature lies in [0, fiber_curv_bound].
inline FamilyParams vb_lift(const FamilyParams& base, int rank, const Rational& La = Rational(1),
                            const Rational& fiber_curv_bound = Rational(1)) {
    if (rank < 0) throw SpecError("rank must be nonnegative");
    need_curvature(base, "base");
    if (rank == 0) return base;
    FamilyParams fiber = ricnneg_params(rank, fiber_curv_bound);
    return lemma_main_a(base, fiber, La);
}

// ---------------------------------------------------------------------------
// Plans

class BundlePlan;

namespace plan {
struct RicNonneg {
    int dim = 0;
    Rational L{1};
};
struct Nilmanifold {
    int dim = 0;
    Rational q{2};
    Rational c{1};
    std::optional<CurvatureBound> curvature;
};
struct Custom {
    FamilyParams params;
};
/// A leaf kind with no certificate constructor (e.g. "sol").
struct Unsupported {
    std::string kind;
};
struct FiberBundle;
struct FlatBundle;
struct VectorBundle;
}  // namespace plan

struct PlanNode;

class BundlePlan {
public:
    BundlePlan() = default;
    explicit BundlePlan(std::shared_ptr<const PlanNode> n) : node_(std::move(n)) {}
    const PlanNode& node() const {
        if (!node_) throw SpecError("empty plan");
        return *node_;
    }
    std::string tag;  // opaque symmetry-group note

private:
    std::shared_ptr<const PlanNode> node_;
};

namespace plan {
struct FiberBundle {
    BundlePlan base;
    BundlePlan fiber;
    std::optional<Rational> La;
};
struct FlatBundle {
    BundlePlan base;
    BundlePlan fiber;
};
struct VectorBundle {
    BundlePlan base;
    int rank = 0;
    Rational La{1};
    Rational fiber_curv_bound{1};
};
}  // namespace plan

struct PlanNode {
    std::variant<plan::RicNonneg, plan::Nilmanifold, plan::Custom, plan::Unsupported, plan::FiberBundle,
                 plan::FlatBundle, plan::VectorBundle>
        v;
};

template <class T>
BundlePlan make_plan(T node) {
    return BundlePlan(std::make_shared<const PlanNode>(PlanNode{std::move(node)}));
}

inline BundlePlan ric_nonneg(int dim, Rational L = Rational(1)) { return make_plan(plan::RicNonneg{dim, L}); }
inline BundlePlan nilmanifold(int dim, Rational q = Rational(2), Rational c = Rational(1)) {
    return make_plan(plan::Nilmanifold{dim, q, c, std::nullopt});
}
inline BundlePlan custom(FamilyParams fp) { return make_plan(plan::Custom{std::move(fp)}); }
inline BundlePlan fiber_bundle(BundlePlan base, BundlePlan fiber, std::optional<Rational> La = std::nullopt) {
    return make_plan(plan::FiberBundle{std::move(base), std::move(fiber), La});
}
inline BundlePlan flat_bundle(BundlePlan base, BundlePlan fiber) {
    return make_plan(plan::FlatBundle{std::move(base), std::move(fiber)});
}
inline BundlePlan vector_bundle(BundlePlan base, int rank, Rational La = Rational(1),
                                Rational fiber_curv_bound = Rational(1)) {
    return make_plan(plan::VectorBundle{std::move(base), rank, La, fiber_curv_bound});
}

struct TraceStep {
    std::string path;  // "root", "root.base", ...
    std::string rule;
    std::string result;
};

struct PlanResult {
    FamilyParams params;      // certificate of the total space
    FamilyParams normalized;  // M_2 form with every m_i >= m_lo > 0
    Rational m_lo;
    int n = 0;
    double k = 0.0;
    long p_bound = 0;
    std::vector<TraceStep> trace;
};

namespace detail {

struct Folder {
    std::vector<TraceStep>& trace;

    FamilyParams record(const std::string& path, std::string rule, FamilyParams fp) {
        trace.push_back({path, std::move(rule), describe(fp)});
        return fp;
    }

    FamilyParams operator()(const BundlePlan& p, const std::string& path) {
        return std::visit([&](const auto& n) { return fold(n, path); }, p.node().v);
    }

    FamilyParams fold(const plan::RicNonneg& n, const std::string& path) {
        return record(path, "ricnneg_params", ricnneg_params(n.dim, n.L));
    }
    FamilyParams fold(const plan::Nilmanifold& n, const std::string& path) {
        return record(path, "nilmanifold_params", nilmanifold_params(n.dim, n.q, n.c, n.curvature));
    }
    FamilyParams fold(const plan::Custom& n, const std::string& path) {
        validate(n.params);
        return record(path, "custom", n.params);
    }
    FamilyParams fold(const plan::Unsupported& n, const std::string& path) {
        throw SpecError("no certificate constructor for leaf kind '" + n.kind + "' at " + path);
    }

    /// Shrinks the base exponents until a fixed fiber admits variant A.
    FamilyParams fit_base(FamilyParams base, const FamilyParams& fiber, const std::string& path) {
        if (fiber.every_q) return base;
        const Rational need = required_fiber_q(base, fiber);
        if (fiber.q >= need) return base;
        const Rational mh = m_hat(base, fiber);
        if (fiber.q > mh * 2 && !base.every_q)
            return record(path, "weaken", weaken(base, (fiber.q - mh * 2) / 3));
        // Shrinking the base drives the requirement down to 2f, no further.
        if (fiber.curvature && fiber.curvature->e * 2 >= fiber.q) {
            std::ostringstream os;
            os << "lemma_main(A) at " << path << ": fiber q-budget " << fiber.q << " cannot exceed 2*f = "
               << fiber.curvature->e * 2;
            throw SpecError(os.str());
        }
        FamilyParams b = reparametrize(base, Rational(1, 2));
        while (required_fiber_q(b, fiber) > fiber.q) b = reparametrize(b, Rational(1, 2));
        return record(path, "reparametrize", b);
    }

    FamilyParams fold(const plan::FiberBundle& n, const std::string& path) {
        FamilyParams base = (*this)(n.base, path + ".base");
        const FamilyParams fiber = (*this)(n.fiber, path + ".fiber");
        const Rational La = n.La ? *n.La : fiber.a_bound ? *fiber.a_bound : Rational(1);
        if (La.is_zero()) return record(path, "lemma_main.C", lemma_main_c(base, fiber, La));
        if (base.curvature && fiber.curvature && fiber.curvature->L.is_zero() && base.curvature->e.is_zero())
            return record(path, "lemma_main.B", lemma_main_b(base, fiber, La));
        base = fit_base(base, fiber, path);
        return record(path, "lemma_main.A", lemma_main_a(base, fiber, La));
    }
    FamilyParams fold(const plan::FlatBundle& n, const std::string& path) {
        const FamilyParams base = (*this)(n.base, path + ".base");
        const FamilyParams fiber = (*this)(n.fiber, path + ".fiber");
        return record(path, "lemma_main.C", lemma_main_c(base, fiber, Rational(0)));
    }
    FamilyParams fold(const plan::VectorBundle& n, const std::string& path) {
        const FamilyParams base = (*this)(n.base, path + ".base");
        return record(path, "vb_lift", vb_lift(base, n.rank, n.La, n.fiber_curv_bound));
    }
};

}  // namespace detail

struct Normalized {
    FamilyParams params;  // q = 2
    Rational r;           // rescale amount, also the lower end of every m_i
    double k = 0.0;
};

/// Normal form for the positivity search: reparametrize to q = 2 + 2r, then
/// rescale by r, giving M_2 with every m_i in [r, m]. r is picked from a fixed
/// candidate set to minimize k.
inline Normalized normalize(const FamilyParams& fp) {
    validate(fp);
    if (fp.dim < 1) throw SpecError("cannot normalize a zero-dimensional certificate");
    std::optional<Normalized> best;
    for (const Rational r : {Rational(1, 8), Rational(1, 4), Rational(3, 8), Rational(1, 2), Rational(3, 4),
                             Rational(1), Rational(3, 2), Rational(2), Rational(3), Rational(4)}) {
        FamilyParams x = reparametrize_to(fp, r * 2 + 2);
        x.every_q = false;
        x = rescale(x, r);
        const double k = positivity::k_bound_range(x.dim, x.c.to_double(), r.to_double(), x.m.to_double());
        if (!best || k < best->k) best = Normalized{x, r, k};
    }
    return *best;
}

inline PlanResult evaluate_plan(const BundlePlan& p) {
    PlanResult res;
    detail::Folder fold{res.trace};
    res.params = fold(p, "root");
    if (res.params.dim < 1) throw SpecError("plan evaluates to a zero-dimensional space");
    const Normalized norm = normalize(res.params);
    fold.record("root", "reparametrize", reparametrize_to(res.params, norm.params.q + norm.r * 2));
    fold.record("root", "rescale", norm.params);
    res.normalized = norm.params;
    res.m_lo = norm.r;
    res.n = norm.params.dim;
    res.k = norm.k;
    res.p_bound = positivity::p_from_k(res.k);
    std::ostringstream os;
    os << "k = " << res.k << ", pBound = " << res.p_bound;
    res.trace.push_back({"root", "k_bound", os.str()});
    return res;
}

}  // namespace ricci_forge::bundlecalc
