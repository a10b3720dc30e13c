#pragma once

// The ricci-forge command line: one subcommand per capability, reports as a
// human table, JSON or CSV. Exit codes: 0 all checks pass, 2 a check failed,
// 3 usage or spec error, 4 numeric or domain error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bundlecalc.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "positivity.hpp"
#include "variation.hpp"
#include "warped.hpp"

#ifndef RICCI_FORGE_VERSION
#define RICCI_FORGE_VERSION "0.0.0"
#endif

namespace ricci_forge::cli {

using io::json;
using Mat = Eigen::MatrixXd;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitUsage = 3;
inline constexpr int kExitNumeric = 4;

inline constexpr double kNoTolerance = std::numeric_limits<double>::quiet_NaN();

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = kNoTolerance;
};

struct Report {
    std::string subcommand;
    json inputs = json::object();
    json results = json::object();
    std::vector<Check> checks;
    std::vector<std::string> notes;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }

    void check(std::string name, bool ok, double value, double tolerance = kNoTolerance) {
        checks.push_back({std::move(name), ok, value, tolerance});
    }

    json to_json() const {
        json cs = json::array();
        for (const auto& c : checks)
            cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}});
        json j = {{"tool", "ricci-forge"}, {"version", RICCI_FORGE_VERSION}, {"subcommand", subcommand},
                  {"inputs", inputs},      {"results", results},            {"checks", cs}};
        if (!notes.empty()) j["notes"] = notes;
        return j;
    }
};

enum class Format { Human, Json, Csv };

namespace detail {

inline void flatten(std::ostream& os, const json& j, const std::string& key) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(os, v, key.empty() ? k : key + "." + k);
        return;
    }
    if (j.is_array() && std::any_of(j.begin(), j.end(), [](const json& e) { return e.is_object(); })) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(os, j[i], key + "[" + std::to_string(i) + "]");
        return;
    }
    os << "  " << key << ": " << io::dump(j, 0) << '\n';
}

inline std::string render(const Report& rep, Format fmt) {
    std::ostringstream os;
    switch (fmt) {
        case Format::Json: os << io::dump(rep.to_json()) << '\n'; break;
        case Format::Csv:
            os << "name,pass,value,tolerance\n";
            for (const auto& c : rep.checks)
                os << '"' << c.name << "\"," << (c.pass ? "true" : "false") << ',' << io::format_double(c.value) << ','
                   << (std::isnan(c.tolerance) ? "" : io::format_double(c.tolerance)) << '\n';
            break;
        case Format::Human: {
            os << "ricci-forge " << RICCI_FORGE_VERSION << "  " << rep.subcommand << '\n';
            for (const auto& n : rep.notes) os << "  " << n << '\n';
            flatten(os, rep.results, "");
            if (!rep.checks.empty()) os << "checks:\n";
            for (const auto& c : rep.checks) {
                os << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  value=" << io::format_double(c.value);
                if (!std::isnan(c.tolerance)) os << "  tol=" << io::format_double(c.tolerance);
                os << '\n';
            }
            const auto passed = std::count_if(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.pass; });
            os << "verdict: " << (rep.pass() ? "PASS" : "FAIL") << " (" << passed << "/" << rep.checks.size()
               << " checks)\n";
            break;
        }
    }
    return os.str();
}

inline void require_positive(double x, const char* what) {
    if (!(x > 0)) throw SpecError(std::string(what) + " must be positive");
}

inline std::vector<double> log_uniform(std::mt19937_64& rng, int count, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(std::exp(u(rng)));
    return out;
}

inline json verdict_json(const positivity::GridVerdict& v) {
    return {{"pass", v.pass}, {"minMargin", v.min_margin}, {"r", v.r_at_min}, {"direction", v.direction}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

struct OracleCheckArgs {
    std::string preset;
    double tol = 1e-6;
    double step = 1e-3;
};

inline Report oracle_check(const OracleCheckArgs& a) {
    detail::require_positive(a.tol, "--tol");
    detail::require_positive(a.step, "--step");
    Report rep;
    rep.subcommand = "oracle-check";
    rep.inputs = {{"preset", a.preset}, {"tol", a.tol}, {"step", a.step}};
    const auto P = oracle::preset(a.preset);
    const oracle::Options opt{a.step, true};
    const int d = P.metric.dim;
    std::optional<Mat> expected;
    if (P.group) {
        expected = lie::left_invariant_ricci(P.group->structure, P.lambda);
    } else if (P.kappa) {
        expected = *P.kappa * (d - 1) * Mat::Identity(d, d);
        std::ostringstream os;
        os << "Ric = " << io::format_double(*P.kappa * (d - 1)) << "*g (kappa*(d-1), kappa = "
           << io::format_double(*P.kappa) << ")";
        rep.notes.push_back(os.str());
    }
    rep.results["metric"] = P.metric.label;
    rep.results["dim"] = d;
    rep.results["kappa"] = P.kappa ? json(*P.kappa) : json(nullptr);
    rep.results["expected"] = expected ? io::to_json(*expected) : json(nullptr);
    json pts = json::array();
    for (std::size_t k = 0; k < P.points.size(); ++k) {
        const auto& x = P.points[k];
        const auto frame = P.group ? oracle::left_invariant_frame(*P.group, P.lambda, x)
                                   : oracle::gram_schmidt_frame(P.metric, x);
        const Mat R = oracle::frame_ricci(P.metric, frame, opt);
        json pt = {{"x", io::to_json(x)}, {"frameRicci", io::to_json(R)}};
        if (expected) {
            const double dev = (R - *expected).cwiseAbs().maxCoeff();
            pt["maxDeviation"] = dev;
            rep.check("frame Ricci at point " + std::to_string(k), dev <= a.tol, dev, a.tol);
        }
        pts.push_back(std::move(pt));
    }
    rep.results["points"] = std::move(pts);
    return rep;
}

struct WarpedArgs {
    std::string spec;
    int p = 3;
    double tol = 1e-5;
    std::vector<double> rs;
    int random_rs = 0;
};

inline Report warped_eval(const WarpedArgs& a) {
    Report rep;
    rep.subcommand = "warped-eval";
    rep.inputs = {{"spec", a.spec}, {"p", a.p}, {"r", a.rs}};
    if (a.p < 2) throw SpecError("--p must be at least 2");
    if (a.rs.empty()) throw SpecError("--r needs at least one radius");
    const warped::WarpedFamily fam(io::warped_spec_from_json(io::load_file(a.spec)));
    json blocks = json::array();
    for (double r : a.rs) {
        const auto B = fam.ricci(fam.sample(r), a.p);
        const auto pd = warped::assemble_and_check_pd(B);
        json b = io::to_json(B);
        b["minEigen"] = pd.min_eigen;
        b["positiveDefinite"] = pd.positive_definite;
        blocks.push_back(std::move(b));
    }
    rep.results["ryTrusted"] = fam.ry_trusted();
    rep.results["blocks"] = std::move(blocks);
    return rep;
}

inline Report warped_verify(const WarpedArgs& a, std::mt19937_64& rng) {
    detail::require_positive(a.tol, "--tol");
    std::vector<double> rs = a.rs.empty() ? std::vector<double>{0.25, 0.5, 1, 2, 4} : a.rs;
    for (double r : detail::log_uniform(rng, a.random_rs, 0.1, 5.0)) rs.push_back(r);
    Report rep;
    rep.subcommand = "warped-verify";
    rep.inputs = {{"spec", a.spec}, {"p", a.p}, {"tol", a.tol}, {"r", rs}};
    const auto spec = io::warped_spec_from_json(io::load_file(a.spec));
    const auto v = warped::verify_against_oracle(spec, a.p, rs, a.tol);
    json gating = json::array();
    json ry = json::array();
    for (const auto& e : v.entries) {
        json row = {{"entry", e.entry}, {"r", e.r}, {"closedForm", e.closed_form}, {"oracle", e.oracle},
                    {"deviation", e.deviation}};
        if (e.entry.rfind("ry", 0) == 0)
            ry.push_back(std::move(row));
        else
            gating.push_back(std::move(row));
        if (e.gating) {
            std::ostringstream name;
            name << e.entry << " at r=" << io::format_double(e.r);
            rep.check(name.str(), e.deviation <= a.tol, e.deviation, a.tol);
        }
    }
    rep.results["maxGatingDeviation"] = v.max_gating_deviation;
    rep.results["entries"] = std::move(gating);
    rep.results["ryMixedTerm"] = {{"gating", v.ry_trusted},
                                {"maxDeviation", v.max_ry_deviation},
                                {"entries", std::move(ry)}};
    rep.notes.push_back(v.ry_trusted ? "ry: frame is adapted (C(i,j,i) = 0), the mixed entries vanish and gate"
                                     : "ry: frame has C(i,j,i) != 0, the closed-form mixed term does not apply; comparison is non-gating");
    return rep;
}

struct SmoothnessArgs {
    std::string spec;
    double tol = 1e-9;
    double r_max = 50.0;
    int grid = 400;
};

inline Report smoothness(const SmoothnessArgs& a) {
    detail::require_positive(a.tol, "--tol");
    detail::require_positive(a.r_max, "--r-max");
    if (a.grid < 2) throw SpecError("--grid must be at least 2");
    Report rep;
    rep.subcommand = "smoothness";
    rep.inputs = {{"spec", a.spec}, {"tol", a.tol}, {"rMax", a.r_max}, {"grid", a.grid}};
    const auto s = warped::smoothness_check(io::warped_spec_from_json(io::load_file(a.spec)), a.tol, a.r_max, a.grid);
    json rows = json::array();
    for (const auto& c : s.checks) {
        rows.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"at", c.at}});
        rep.check(c.name, c.pass, c.value, a.tol);
    }
    rep.results["conditions"] = std::move(rows);
    return rep;
}

struct VariationArgs {
    std::string data;
    std::string preset;
    std::vector<double> ts;
    double tol = 1e-5;
    std::optional<double> C;
    int random_ts = 0;
};

inline variation::SubmersionData load_submersion(const VariationArgs& a, json& inputs) {
    if (a.data.empty() == a.preset.empty()) throw SpecError("give exactly one of --data and --preset");
    if (!a.preset.empty()) {
        inputs["preset"] = a.preset;
        return io::submersion_from_json(json{{"preset", a.preset}});
    }
    inputs["data"] = a.data;
    return io::submersion_from_json(io::load_file(a.data));
}

inline Report variation_eval(const VariationArgs& a) {
    detail::require_positive(a.tol, "--tol");
    Report rep;
    rep.subcommand = "variation-eval";
    const auto d = load_submersion(a, rep.inputs);
    const std::vector<double> ts = a.ts.empty() ? std::vector<double>{1, 0.5, 0.25} : a.ts;
    rep.inputs["t"] = ts;
    rep.inputs["tol"] = a.tol;
    const auto viol = variation::invariant_violations(d);
    rep.results["invariantViolations"] = viol;
    rep.check("data invariants", viol.empty(), static_cast<double>(viol.size()), 0.0);
    const bool hopf = a.preset == "hopf";
    json rows = json::array();
    for (double t : ts) {
        const auto s = variation::canonical_variation_ricci(d, t);
        const Mat M = s.assemble();
        json row = {{"t", t}, {"vv", io::to_json(s.vv)}, {"hh", io::to_json(s.hh)}, {"hv", io::to_json(s.hv)}};
        if (hopf) {
            const Mat O = variation::berger_ricci(t);
            const double dev = (M - O).cwiseAbs().maxCoeff();
            row["oracle"] = io::to_json(O);
            row["maxDeviation"] = dev;
            rep.check("Berger oracle at t=" + io::format_double(t), dev <= a.tol, dev, a.tol);
            if (t == 1.0) {
                const double round = (M - 2 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff();
                rep.check("round S3 Ricci = 2*identity", round <= a.tol, round, a.tol);
            }
        }
        rows.push_back(std::move(row));
    }
    rep.results["blocks"] = std::move(rows);
    return rep;
}

inline Report error_bounds(const VariationArgs& a, std::mt19937_64& rng) {
    Report rep;
    rep.subcommand = "error-bounds";
    const auto d = load_submersion(a, rep.inputs);
    std::vector<double> ts = a.ts.empty() ? std::vector<double>{1, 0.5, 0.1, 0.01} : a.ts;
    for (double t : detail::log_uniform(rng, a.random_ts, 1e-3, 1.0)) ts.push_back(t);
    const double derived = variation::derived_error_constant(d);
    const double C = a.C ? *a.C : derived;
    if (!(C >= 0)) throw SpecError("--C must be nonnegative");
    rep.inputs["t"] = ts;
    rep.inputs["C"] = a.C ? json(*a.C) : json("derived");
    const auto r = variation::error_bound_check(d, C, ts);
    rep.results["C"] = C;
    rep.results["derivedC"] = derived;
    rep.results["maxAUV"] = r.max_aUV;
    rep.results["maxAXY"] = r.max_aXY;
    rep.results["maxDeltaA"] = r.max_deltaA;
    rep.results["minSlack"] = r.min_slack;
    json viol = json::array();
    for (const auto& v : r.violations)
        viol.push_back({{"inequality", v.inequality}, {"t", v.t}, {"i", v.i}, {"j", v.j}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    rep.results["violations"] = std::move(viol);
    for (const char* name : {"offdiag-vv", "offdiag-hh", "mixed-hv", "vv-lower", "hh-lower"}) {
        const auto n = std::count_if(r.violations.begin(), r.violations.end(),
                                     [&](const variation::Violation& v) { return v.inequality == name; });
        rep.check(name, n == 0, static_cast<double>(n), 0.0);
    }
    return rep;
}

struct MinPArgs {
    int n = 1;
    double c = 0.0;
    std::optional<double> m;
    std::vector<double> mi;
    double r_max = 50.0;
    int points = 1000;
};

inline std::vector<double> exponents(const MinPArgs& a) {
    if (!a.mi.empty()) {
        if (a.m) throw SpecError("give --m or --mi, not both");
        return a.mi;
    }
    return std::vector<double>(static_cast<std::size_t>(std::max(a.n, 0)), a.m.value_or(1.0));
}

inline Report minp(const MinPArgs& a) {
    Report rep;
    rep.subcommand = "minp";
    const auto mi = exponents(a);
    rep.inputs = {{"n", a.n}, {"c", a.c}, {"mi", mi}, {"rMax", a.r_max}, {"points", a.points}};
    const positivity::GridSpec grid{a.r_max, a.points};
    const auto res = positivity::min_p(a.n, a.c, mi, grid);
    const bool positive = !mi.empty() && *std::min_element(mi.begin(), mi.end()) > 0;
    std::optional<double> k;
    if (positive || a.n == 0) {
        const double lo = mi.empty() ? 1.0 : *std::min_element(mi.begin(), mi.end());
        const double hi = mi.empty() ? 1.0 : *std::max_element(mi.begin(), mi.end());
        k = positivity::k_bound_range(a.n, a.c, lo, hi);
    }
    rep.results["pStar"] = res.p_star ? json(*res.p_star) : json(nullptr);
    rep.results["kBound"] = k ? json(*k) : json(nullptr);
    rep.results["kBoundArtifactDerived"] = true;
    rep.results["sweeps"] = res.sweeps;
    rep.check("pStar found", res.p_star.has_value(), res.p_star ? static_cast<double>(*res.p_star) : kNoTolerance);
    if (!res.p_star) {
        rep.notes.push_back("no p up to " + std::to_string(positivity::kMaxP) +
                            " makes the grid positive definite (some direction lacks a positive m_i)");
        return rep;
    }
    rep.results["atPStar"] = detail::verdict_json(res.at_p_star);
    rep.check("PD on grid at pStar", res.at_p_star.pass, res.at_p_star.min_margin, 0.0);
    if (res.below) {
        rep.results["belowPStar"] = detail::verdict_json(*res.below);
        rep.check("not PD at pStar-1", !res.below->pass, res.below->min_margin, 0.0);
    }
    if (k)
        rep.check("pStar <= k bound", *res.p_star <= positivity::p_from_k(*k), static_cast<double>(*res.p_star), *k);
    return rep;
}

struct KBoundArgs {
    int n = 1;
    double c = 0.0;
    double m = 1.0;
    std::optional<double> m_hi;
};

inline json coeffs_json(const positivity::Coeffs& c) {
    return {{"K", c.K}, {"L", c.L}, {"R", c.R}, {"S", c.S}, {"threshold", c.threshold()}};
}

inline Report kbound(const KBoundArgs& a) {
    Report rep;
    rep.subcommand = "kbound";
    const double hi = a.m_hi.value_or(a.m);
    rep.inputs = {{"n", a.n}, {"c", a.c}, {"m", a.m}, {"mHi", hi}};
    const double k = positivity::k_bound_range(a.n, a.c, a.m, hi);
    const auto pc = positivity::derive_coefficients(a.n, a.c, std::vector<double>(static_cast<std::size_t>(a.n), a.m));
    json y = json::array();
    for (const auto& c : pc.y) y.push_back(coeffs_json(c));
    rep.results["k"] = k;
    rep.results["pBound"] = positivity::p_from_k(k);
    rep.results["artifactDerived"] = true;
    rep.results["coefficientsAtM"] = {{"rr", coeffs_json(pc.rr)}, {"uu", coeffs_json(pc.uu)}, {"y", std::move(y)}};
    rep.notes.push_back("k(n,c,m) is an artifact-derived sufficient bound: any p > k is positive on every r > 0");
    rep.check("k finite", std::isfinite(k), k);
    return rep;
}

struct PlanArgs {
    std::string file;
};

inline Report plan(const PlanArgs& a) {
    Report rep;
    rep.subcommand = "plan";
    rep.inputs = {{"file", a.file}};
    const auto p = io::plan_from_json(io::load_file(a.file));
    const auto res = bundlecalc::evaluate_plan(p);
    json trace = json::array();
    for (const auto& s : res.trace) trace.push_back({{"path", s.path}, {"rule", s.rule}, {"result", s.result}});
    if (!p.tag.empty()) rep.results["tag"] = p.tag;
    rep.results["certificate"] = io::to_json(res.params);
    rep.results["normalized"] = io::to_json(res.normalized);
    rep.results["mLo"] = res.m_lo.str();
    rep.results["n"] = res.n;
    rep.results["k"] = res.k;
    rep.results["pBound"] = res.p_bound;
    rep.results["constantsArtifactDerived"] = true;
    rep.results["trace"] = std::move(trace);
    rep.check("pBound finite", std::isfinite(res.k), static_cast<double>(res.p_bound));
    return rep;
}

// ---------------------------------------------------------------------------

/// Parses argv, runs one subcommand and writes the report to `out` (and to
/// --out when given). Diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ricci curvature verification and p-bound search", "ricci-forge"};
    app.set_version_flag("--version", std::string(RICCI_FORGE_VERSION));
    app.require_subcommand(1);

    std::string format = "human";
    bool json_flag = false;
    std::string out_path;
    std::uint64_t seed = 1;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "json", "csv"}));
        sub->add_flag("--json", json_flag, "Shorthand for --format json");
        sub->add_option("--out", out_path, "Also write the report to this file");
        sub->add_option("--seed", seed, "Seed for randomized sweeps");
    };

    OracleCheckArgs oa;
    auto* s_oracle = app.add_subcommand("oracle-check", "Frame Ricci of a preset metric vs its known value");
    s_oracle->add_option("--preset", oa.preset, "euclidean:d | sphere:d:a | hyperbolic2 | s3-left-invariant:l1:l2:l3")
        ->required();
    s_oracle->add_option("--tol", oa.tol);
    s_oracle->add_option("--step", oa.step, "Finite difference step");
    common(s_oracle);

    WarpedArgs wa;
    auto* s_weval = app.add_subcommand("warped-eval", "Closed-form Ricci blocks of a warped family");
    s_weval->add_option("--spec", wa.spec)->required();
    s_weval->add_option("--p", wa.p);
    s_weval->add_option("--r", wa.rs)->required();
    common(s_weval);

    auto* s_wverify = app.add_subcommand("warped-verify", "Closed-form blocks vs the chart oracle");
    s_wverify->add_option("--spec", wa.spec)->required();
    s_wverify->add_option("--p", wa.p);
    s_wverify->add_option("--tol", wa.tol);
    s_wverify->add_option("--r", wa.rs);
    s_wverify->add_option("--random-rs", wa.random_rs, "Extra seeded radii in [0.1, 5]");
    common(s_wverify);

    SmoothnessArgs sa;
    auto* s_smooth = app.add_subcommand("smoothness", "Smooth closing conditions at r = 0");
    s_smooth->add_option("--spec", sa.spec)->required();
    s_smooth->add_option("--tol", sa.tol);
    s_smooth->add_option("--r-max", sa.r_max);
    s_smooth->add_option("--grid", sa.grid);
    common(s_smooth);

    VariationArgs va;
    double C = 0.0;
    auto variation_opts = [&](CLI::App* sub) {
        sub->add_option("--data", va.data, "Submersion data JSON");
        sub->add_option("--preset", va.preset)->check(CLI::IsMember({"hopf"}));
        sub->add_option("--t", va.ts);
        common(sub);
    };
    auto* s_veval = app.add_subcommand("variation-eval", "Ricci blocks of the canonical variation");
    s_veval->add_option("--tol", va.tol);
    variation_opts(s_veval);
    auto* s_err = app.add_subcommand("error-bounds", "O(t) error inequalities of the canonical variation");
    auto* c_opt = s_err->add_option("--C", C, "Error constant (default: derived)");
    s_err->add_option("--random-ts", va.random_ts, "Extra seeded t in [1e-3, 1]");
    variation_opts(s_err);

    MinPArgs ma;
    double m_single = 1.0;
    auto* s_minp = app.add_subcommand("minp", "Smallest p with a positive definite Ricci on the grid");
    s_minp->add_option("--n", ma.n)->required();
    s_minp->add_option("--c", ma.c);
    auto* m_opt = s_minp->add_option("--m", m_single, "Common exponent m_i");
    s_minp->add_option("--mi", ma.mi, "Per-direction exponents");
    s_minp->add_option("--r-max", ma.r_max);
    s_minp->add_option("--points", ma.points);
    common(s_minp);

    KBoundArgs ka;
    double m_hi = 0.0;
    auto* s_k = app.add_subcommand("kbound", "Explicit sufficient bound k(n, c, m)");
    s_k->add_option("--n", ka.n)->required();
    s_k->add_option("--c", ka.c);
    s_k->add_option("--m", ka.m);
    auto* mhi_opt = s_k->add_option("--m-hi", m_hi, "Upper end when the exponents range over [m, m-hi]");
    common(s_k);

    PlanArgs pa;
    auto* s_plan = app.add_subcommand("plan", "Evaluate a bundle plan to a certificate and p bound");
    s_plan->add_option("--file", pa.file)->required();
    common(s_plan);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForVersion&) {
        out << RICCI_FORGE_VERSION << '\n';
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (*c_opt) va.C = C;
    if (*m_opt) ma.m = m_single;
    if (*mhi_opt) ka.m_hi = m_hi;

    std::mt19937_64 rng(seed);
    const Format fmt = json_flag || format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Human;
    try {
        Report rep;
        if (*s_oracle)
            rep = oracle_check(oa);
        else if (*s_weval)
            rep = warped_eval(wa);
        else if (*s_wverify)
            rep = warped_verify(wa, rng);
        else if (*s_smooth)
            rep = smoothness(sa);
        else if (*s_veval)
            rep = variation_eval(va);
        else if (*s_err)
            rep = error_bounds(va, rng);
        else if (*s_minp)
            rep = minp(ma);
        else if (*s_k)
            rep = kbound(ka);
        else
            rep = plan(pa);
        rep.inputs["seed"] = seed;
        const std::string text = detail::render(rep, fmt);
        out << text;
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            if (!f) throw SpecError("cannot write " + out_path);
            f << text;
        }
        return rep.pass() ? kExitPass : kExitCheckFailed;
    } catch (const SpecError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::overflow_error& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace ricci_forge::cli
