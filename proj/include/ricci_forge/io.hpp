#pragma once

// JSON readers for warped specs, submersion data and bundle plans, and a
// deterministic writer that prints every double with 17 significant digits.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bundlecalc.hpp"
#include "error.hpp"
#include "exprs.hpp"
#include "variation.hpp"
#include "warped.hpp"

namespace ricci_forge::io {

using json = nlohmann::ordered_json;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad << json(k).dump() << (indent > 0 ? ": " : ":");
                write(os, v, indent, depth + 1);
            }
            os << nl << close << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
            os << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << (flat ? ", " : ",");
                if (!flat) os << nl << pad;
                first = false;
                write(os, v, flat ? 0 : indent, depth + 1);
            }
            if (!flat) os << nl << close;
            os << ']';
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (std::isfinite(x))
                os << format_double(x);
            else
                os << "null";
            return;
        }
        default: os << j.dump();
    }
}

}  // namespace detail

/// Pretty JSON with %.17g doubles; non-finite doubles become null.
inline std::string dump(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::write(os, j, indent, 0);
    return os.str();
}

inline json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError(path + ": malformed JSON: " + e.what());
    }
}

inline json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SpecError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

inline int to_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw SpecError(what + " must be an integer");
    return j.get<int>();
}

inline Mat to_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw SpecError(what + " must have " + std::to_string(rows) + " rows");
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw SpecError(what + " must have " + std::to_string(cols) + " columns");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const auto& x = row[static_cast<std::size_t>(k)];
            if (!x.is_number()) throw SpecError(what + " entries must be numbers");
            m(i, k) = x.get<double>();
        }
    }
    return m;
}

/// Accepts an integer, a "p/q" or decimal string, or a float (converted exactly).
inline Rational to_rational(const json& j, const std::string& what) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::exception& e) {
            throw SpecError(what + ": " + e.what());
        }
    }
    throw SpecError(what + " must be a number or a rational string");
}

// ---------------------------------------------------------------------------
// Warped family specs

/// {"n", "f", "h": [...], "structure": [[i,j,k,C], ...], "baseRicci", "chart"}
inline warped::WarpedFamilySpec warped_spec_from_json(const json& j) {
    const std::string where = "warped spec";
    warped::WarpedFamilySpec s;
    s.n = to_int(need(j, "n", where), "n");
    if (s.n < 0) throw SpecError("n must be nonnegative");
    s.f = exprs::parse(need(j, "f", where).get<std::string>());
    const json h = j.value("h", json::array());
    if (!h.is_array() || static_cast<int>(h.size()) != s.n) throw SpecError("h must list n profiles");
    for (const auto& e : h) s.h.push_back(exprs::parse(e.get<std::string>()));
    s.structure = lie::StructureConstants(s.n);
    for (const auto& t : j.value("structure", json::array())) {
        if (!t.is_array() || t.size() != 4) throw SpecError("structure entries are [i, j, k, C]");
        const int i = to_int(t[0], "structure index");
        const int k1 = to_int(t[1], "structure index");
        const int k2 = to_int(t[2], "structure index");
        if (i < 0 || k1 < 0 || k2 < 0 || i >= s.n || k1 >= s.n || k2 >= s.n)
            throw SpecError("structure index out of range");
        s.structure.set(i, k1, k2, t[3].get<double>());
    }
    s.chart = j.value("chart", std::string("flat"));
    const json b = j.value("baseRicci", json("zero"));
    if (b.is_object()) {
        s.base_ricci = warped::BaseRicci::constant_matrix(to_matrix(need(b, "constant", "baseRicci"), s.n, s.n,
                                                                    "baseRicci.constant"));
    } else if (b.is_string()) {
        const auto str = b.get<std::string>();
        const std::string scaled = "scaledIdentity:";
        if (str == "zero")
            s.base_ricci = warped::BaseRicci::zero();
        else if (str == "leftInvariant")
            s.base_ricci = warped::BaseRicci::left_invariant();
        else if (str.rfind(scaled, 0) == 0)
            s.base_ricci = warped::BaseRicci::scaled_identity(exprs::parse(str.substr(scaled.size())));
        else
            throw SpecError("unknown baseRicci \"" + str + "\"");
    } else {
        throw SpecError("baseRicci must be a string or {\"constant\": matrix}");
    }
    warped::validate(s);
    return s;
}

inline json to_json(const warped::RicciBlocks& b) {
    return {{"r", b.r},   {"p", b.p},           {"rr", b.rr}, {"uu", b.uu}, {"yy", to_json(b.yy)},
            {"ry", to_json(b.ry)}, {"ryTrusted", b.ry_trusted}};
}

// ---------------------------------------------------------------------------
// Submersion data

/// {"preset": "hopf"} or {"dimB", "dimF", "ricB", "ricF", "aUV", "aXY", "deltaA"}.
inline variation::SubmersionData submersion_from_json(const json& j) {
    if (j.contains("preset")) {
        const auto name = j.at("preset").get<std::string>();
        if (name != "hopf") throw SpecError("unknown submersion preset \"" + name + "\"");
        return variation::hopf_preset();
    }
    const std::string where = "submersion data";
    variation::SubmersionData d;
    d.dimB = to_int(need(j, "dimB", where), "dimB");
    d.dimF = to_int(need(j, "dimF", where), "dimF");
    if (d.dimB < 1 || d.dimF < 1) throw SpecError("dimB and dimF must be positive");
    d.ricB = to_matrix(need(j, "ricB", where), d.dimB, d.dimB, "ricB");
    d.ricF = to_matrix(need(j, "ricF", where), d.dimF, d.dimF, "ricF");
    d.aUV = to_matrix(need(j, "aUV", where), d.dimF, d.dimF, "aUV");
    d.aXY = to_matrix(need(j, "aXY", where), d.dimB, d.dimB, "aXY");
    d.deltaA = to_matrix(need(j, "deltaA", where), d.dimB, d.dimF, "deltaA");
    return d;
}

// ---------------------------------------------------------------------------
// Certificates and plans

inline json to_json(const bundlecalc::FamilyParams& fp) {
    json j = {{"q", fp.every_q ? std::string("every") : fp.q.str()},
              {"qRef", fp.q.str()},
              {"c", fp.c.str()},
              {"m", fp.m.str()},
              {"dim", fp.dim}};
    if (fp.curvature)
        j["curvature"] = {{"L", fp.curvature->L.str()}, {"e", fp.curvature->e.str()}};
    else
        j["curvature"] = nullptr;
    if (fp.a_bound) j["aBound"] = fp.a_bound->str();
    return j;
}

inline bundlecalc::FamilyParams family_from_json(const json& j) {
    const std::string where = "custom certificate";
    bundlecalc::FamilyParams fp;
    fp.q = to_rational(need(j, "q", where), "q");
    fp.c = to_rational(j.value("c", json(0)), "c");
    fp.m = to_rational(j.value("m", json(0)), "m");
    fp.dim = to_int(need(j, "dim", where), "dim");
    if (j.contains("curvature")) {
        const auto& k = j.at("curvature");
        fp.curvature = bundlecalc::CurvatureBound{to_rational(need(k, "L", "curvature"), "curvature.L"),
                                                  to_rational(need(k, "e", "curvature"), "curvature.e")};
    }
    if (j.contains("aBound")) fp.a_bound = to_rational(j.at("aBound"), "aBound");
    fp.every_q = j.value("everyQ", false);
    bundlecalc::validate(fp);
    return fp;
}

inline bundlecalc::BundlePlan plan_from_json(const json& j, const std::string& path = "root") {
    namespace bc = bundlecalc;
    if (!j.is_object()) throw SpecError(path + ": plan node must be an object");
    const auto kind = need(j, "kind", path).get<std::string>();
    auto sub = [&](const char* key) { return plan_from_json(need(j, key, path), path + "." + key); };
    bc::BundlePlan out;
    if (kind == "ricNonneg") {
        out = bc::ric_nonneg(to_int(need(j, "dim", path), "dim"), to_rational(j.value("L", json(1)), "L"));
    } else if (kind == "nilmanifold") {
        bc::plan::Nilmanifold n;
        n.dim = to_int(need(j, "dim", path), "dim");
        n.q = to_rational(j.value("q", json(2)), "q");
        n.c = to_rational(j.value("c", json(1)), "c");
        if (j.contains("curvature")) {
            const auto& k = j.at("curvature");
            n.curvature = bc::CurvatureBound{to_rational(need(k, "L", path), "L"), to_rational(need(k, "e", path), "e")};
        }
        out = bc::make_plan(n);
    } else if (kind == "custom") {
        out = bc::custom(family_from_json(j));
    } else if (kind == "fiberBundle") {
        std::optional<Rational> La;
        if (j.contains("La")) La = to_rational(j.at("La"), "La");
        out = bc::fiber_bundle(sub("base"), sub("fiber"), La);
    } else if (kind == "flatBundle") {
        out = bc::flat_bundle(sub("base"), sub("fiber"));
    } else if (kind == "vectorBundle") {
        out = bc::vector_bundle(sub("base"), to_int(need(j, "rank", path), "rank"),
                                to_rational(j.value("La", json(1)), "La"),
                                to_rational(j.value("fiberCurvBound", json(1)), "fiberCurvBound"));
    } else {
        out = bc::make_plan(bc::plan::Unsupported{kind});
    }
    out.tag = j.value("tag", std::string());
    return out;
}

}  // namespace ricci_forge::io
