#pragma once

// Expressions in the single variable r: parsing, printing, exact symbolic
// differentiation and IEEE evaluation. Trees are immutable and shared.

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "error.hpp"
#include "rational.hpp"

namespace ricci_forge::exprs {

enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Sqrt, Exp };

/// A literal value: exact rational or IEEE double.
using Number = std::variant<Rational, double>;

inline double to_double(const Number& n) {
    return std::holds_alternative<Rational>(n) ? std::get<Rational>(n).to_double() : std::get<double>(n);
}

class Expr;

namespace detail {
struct Node {
    Kind kind;
    Number value{Rational(0)};     // Constant
    Rational exponent{0};          // Pow
    std::shared_ptr<const Node> a; // first operand / function argument / power base
    std::shared_ptr<const Node> b; // second operand of a binary node
};
}  // namespace detail

class Expr {
  public:
    Kind kind() const { return node_->kind; }
    const Number& value() const { return node_->value; }
    const Rational& exponent() const { return node_->exponent; }
    Expr lhs() const { return Expr(node_->a); }
    Expr rhs() const { return Expr(node_->b); }
    Expr arg() const { return Expr(node_->a); }

    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_rational(const Rational& q) const {
        return is_constant() && std::holds_alternative<Rational>(value()) && std::get<Rational>(value()) == q;
    }

    friend bool operator==(const Expr& x, const Expr& y);

    static Expr make(detail::Node n) { return Expr(std::make_shared<const detail::Node>(std::move(n))); }
    const std::shared_ptr<const detail::Node>& node() const { return node_; }

  private:
    explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::Node> node_;
};

inline bool operator==(const Expr& x, const Expr& y) {
    if (x.node_ == y.node_) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
        case Kind::Constant: {
            const auto& u = x.value();
            const auto& v = y.value();
            if (u.index() != v.index()) return false;
            if (std::holds_alternative<Rational>(u)) return std::get<Rational>(u) == std::get<Rational>(v);
            return std::bit_cast<std::uint64_t>(std::get<double>(u)) ==
                   std::bit_cast<std::uint64_t>(std::get<double>(v));
        }
        case Kind::Variable:
            return true;
        case Kind::Pow:
            return x.exponent() == y.exponent() && x.arg() == y.arg();
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Sqrt:
        case Kind::Exp:
            return x.arg() == y.arg();
        default:
            return x.lhs() == y.lhs() && x.rhs() == y.rhs();
    }
}

// ---------------------------------------------------------------------------
// Construction. Every builder folds literal subtrees (except division by zero
// and irrational powers); nothing else is simplified.

inline Expr constant(const Rational& q) { return Expr::make({Kind::Constant, q, {}, nullptr, nullptr}); }
inline Expr constant(double x) { return Expr::make({Kind::Constant, x, {}, nullptr, nullptr}); }
inline Expr constant(const Number& n) { return Expr::make({Kind::Constant, n, {}, nullptr, nullptr}); }
inline Expr variable() { return Expr::make({Kind::Variable, Rational(0), {}, nullptr, nullptr}); }

namespace detail {

inline Expr raw_binary(Kind k, const Expr& a, const Expr& b) {
    return Expr::make({k, Rational(0), {}, a.node(), b.node()});
}
inline Expr raw_unary(Kind k, const Expr& a) { return Expr::make({k, Rational(0), {}, a.node(), nullptr}); }

inline std::optional<Number> fold_binary(Kind k, const Number& x, const Number& y) {
    if (std::holds_alternative<Rational>(x) && std::holds_alternative<Rational>(y)) {
        const auto& p = std::get<Rational>(x);
        const auto& q = std::get<Rational>(y);
        try {
            switch (k) {
                case Kind::Add: return Number(p + q);
                case Kind::Sub: return Number(p - q);
                case Kind::Mul: return Number(p * q);
                case Kind::Div:
                    if (q.is_zero()) return std::nullopt;
                    return Number(p / q);
                default: return std::nullopt;
            }
        } catch (const std::overflow_error&) {
            // fall through to floating point folding
        }
    }
    const double p = to_double(x);
    const double q = to_double(y);
    switch (k) {
        case Kind::Add: return Number(p + q);
        case Kind::Sub: return Number(p - q);
        case Kind::Mul: return Number(p * q);
        case Kind::Div:
            if (q == 0.0) return std::nullopt;
            return Number(p / q);
        default: return std::nullopt;
    }
}

}  // namespace detail

inline Expr binary(Kind k, const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        if (auto folded = detail::fold_binary(k, a.value(), b.value())) return constant(*folded);
    }
    return detail::raw_binary(k, a, b);
}

inline Expr add(const Expr& a, const Expr& b) { return binary(Kind::Add, a, b); }
inline Expr sub(const Expr& a, const Expr& b) { return binary(Kind::Sub, a, b); }
inline Expr mul(const Expr& a, const Expr& b) { return binary(Kind::Mul, a, b); }
inline Expr div(const Expr& a, const Expr& b) { return binary(Kind::Div, a, b); }

inline Expr neg(const Expr& a) {
    if (a.is_constant()) {
        if (std::holds_alternative<Rational>(a.value())) {
            try {
                return constant(-std::get<Rational>(a.value()));
            } catch (const std::overflow_error&) {
            }
        }
        return constant(-to_double(a.value()));
    }
    return detail::raw_unary(Kind::Neg, a);
}

inline Expr pow(const Expr& base, const Rational& k) {
    if (base.is_constant() && k.is_integer()) {
        const Number& v = base.value();
        const bool zero = to_double(v) == 0.0;
        if (!(zero && k.sign() < 0)) {
            if (std::holds_alternative<Rational>(v)) {
                try {
                    return constant(std::get<Rational>(v).pow(k.num()));
                } catch (const std::overflow_error&) {
                }
            }
            return constant(std::pow(to_double(v), static_cast<double>(k.num())));
        }
    }
    return Expr::make({Kind::Pow, Rational(0), k, base.node(), nullptr});
}

inline Expr sin(const Expr& a) { return detail::raw_unary(Kind::Sin, a); }
inline Expr cos(const Expr& a) { return detail::raw_unary(Kind::Cos, a); }
inline Expr sqrt(const Expr& a) { return detail::raw_unary(Kind::Sqrt, a); }
inline Expr exp(const Expr& a) { return detail::raw_unary(Kind::Exp, a); }

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(const Expr& e) {
    switch (e.kind()) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        case Kind::Constant: {
            const Number& v = e.value();
            if (std::holds_alternative<Rational>(v)) {
                const auto& q = std::get<Rational>(v);
                if (!q.is_integer()) return 2;
                return q.sign() < 0 ? 3 : 5;
            }
            return std::signbit(std::get<double>(v)) ? 3 : 5;
        }
        default: return 5;
    }
}

inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, ptr);
    if (s.find_first_of(".eni") == std::string::npos) s += ".0";
    return s;
}

inline std::string print_node(const Expr& e);

inline std::string wrap(const Expr& e, int min_prec) {
    std::string s = print_node(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

inline std::string print_node(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: {
            const Number& v = e.value();
            if (std::holds_alternative<Rational>(v)) return std::get<Rational>(v).str();
            return format_double(std::get<double>(v));
        }
        case Kind::Variable: return "r";
        case Kind::Add: return wrap(e.lhs(), 1) + "+" + wrap(e.rhs(), 2);
        case Kind::Sub: return wrap(e.lhs(), 1) + "-" + wrap(e.rhs(), 2);
        case Kind::Mul: return wrap(e.lhs(), 2) + "*" + wrap(e.rhs(), 3);
        case Kind::Div: return wrap(e.lhs(), 2) + "/" + wrap(e.rhs(), 3);
        case Kind::Neg: return "-" + wrap(e.arg(), 3);
        case Kind::Pow: {
            const Rational& k = e.exponent();
            const std::string ks = k.is_integer() && k.sign() >= 0 ? k.str() : "(" + k.str() + ")";
            return wrap(e.arg(), 5) + "^" + ks;
        }
        case Kind::Sin: return "sin(" + print_node(e.arg()) + ")";
        case Kind::Cos: return "cos(" + print_node(e.arg()) + ")";
        case Kind::Sqrt: return "sqrt(" + print_node(e.arg()) + ")";
        case Kind::Exp: return "exp(" + print_node(e.arg()) + ")";
    }
    return {};
}

}  // namespace detail

/// Text form that parses back to a structurally equal tree.
inline std::string to_string(const Expr& e) { return detail::print_node(e); }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
  public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse_all() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+')) e = add(e, term());
            else if (accept('-')) e = sub(e, term());
            else return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) e = mul(e, unary());
            else if (accept('/')) e = div(e, unary());
            else return e;
        }
    }

    Expr unary() {
        if (accept('-')) return neg(unary());
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip_ws();
        const std::size_t at = pos_;
        if (!accept('^')) return base;
        Expr k = unary();
        if (!k.is_constant() || !std::holds_alternative<Rational>(k.value()))
            throw ParseError("exponent must be a rational constant", at + 1);
        return pow(base, std::get<Rational>(k.value()));
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        bool is_float = false;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            is_float = true;
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                is_float = true;
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        const std::string_view lit = s_.substr(start, pos_ - start);
        if (lit == ".") throw ParseError("malformed number", start);
        if (!is_float) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
            if (ec == std::errc() && ptr == lit.data() + lit.size()) return constant(Rational(v));
        }
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), d);
        if (ec != std::errc() || ptr != lit.data() + lit.size()) throw ParseError("malformed number", start);
        return constant(d);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string_view name = s_.substr(start, pos_ - start);
        if (name == "r") return variable();
        Kind k;
        if (name == "sin") k = Kind::Sin;
        else if (name == "cos") k = Kind::Cos;
        else if (name == "sqrt") k = Kind::Sqrt;
        else if (name == "exp") k = Kind::Exp;
        else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        expect('(');
        Expr a = expr();
        expect(')');
        return raw_unary(k, a);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

inline double eval(const Expr& e, double r) {
    switch (e.kind()) {
        case Kind::Constant: return to_double(e.value());
        case Kind::Variable: return r;
        case Kind::Add: return eval(e.lhs(), r) + eval(e.rhs(), r);
        case Kind::Sub: return eval(e.lhs(), r) - eval(e.rhs(), r);
        case Kind::Mul: return eval(e.lhs(), r) * eval(e.rhs(), r);
        case Kind::Div: {
            const double num = eval(e.lhs(), r);
            const double den = eval(e.rhs(), r);
            if (den == 0.0) throw DomainError("division by zero in '" + to_string(e) + "'");
            return num / den;
        }
        case Kind::Neg: return -eval(e.arg(), r);
        case Kind::Pow: {
            const double b = eval(e.arg(), r);
            const Rational& k = e.exponent();
            if (b == 0.0 && k.sign() < 0) throw DomainError("division by zero in '" + to_string(e) + "'");
            if (k.is_integer()) return std::pow(b, static_cast<double>(k.num()));
            const double x = k.to_double();
            if (b >= 0.0) return std::pow(b, x);
            if (k.den() % 2 == 0) throw DomainError("even root of negative value in '" + to_string(e) + "'");
            const double mag = std::pow(-b, x);
            return k.num() % 2 == 0 ? mag : -mag;
        }
        case Kind::Sin: return std::sin(eval(e.arg(), r));
        case Kind::Cos: return std::cos(eval(e.arg(), r));
        case Kind::Sqrt: {
            const double a = eval(e.arg(), r);
            if (a < 0.0) throw DomainError("even root of negative value in '" + to_string(e) + "'");
            return std::sqrt(a);
        }
        case Kind::Exp: return std::exp(eval(e.arg(), r));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace detail {

// Builders used only by diff: literal folding plus the unit/zero identities
// that keep derivative trees readable.
inline bool is_zero(const Expr& e) { return e.is_constant() && to_double(e.value()) == 0.0; }
inline bool is_one(const Expr& e) { return e.is_rational(Rational(1)); }

inline Expr d_add(const Expr& a, const Expr& b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return add(a, b);
}
inline Expr d_neg(const Expr& a) {
    if (a.kind() == Kind::Neg) return a.arg();
    return neg(a);
}
inline Expr d_sub(const Expr& a, const Expr& b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return d_neg(b);
    return sub(a, b);
}
inline Expr d_mul(const Expr& a, const Expr& b) {
    if (is_zero(a) || is_zero(b)) return constant(Rational(0));
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    return mul(a, b);
}
inline Expr d_div(const Expr& a, const Expr& b) {
    if (is_one(b)) return a;
    if (is_zero(a) && !is_zero(b)) return constant(Rational(0));
    return div(a, b);
}
inline Expr d_pow(const Expr& a, const Rational& k) {
    if (k.is_zero()) return constant(Rational(1));
    if (k == Rational(1)) return a;
    return pow(a, k);
}

inline Expr diff1(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: return constant(Rational(0));
        case Kind::Variable: return constant(Rational(1));
        case Kind::Add: return d_add(diff1(e.lhs()), diff1(e.rhs()));
        case Kind::Sub: return d_sub(diff1(e.lhs()), diff1(e.rhs()));
        case Kind::Mul:
            return d_add(d_mul(diff1(e.lhs()), e.rhs()), d_mul(e.lhs(), diff1(e.rhs())));
        case Kind::Div: {
            const Expr num = d_sub(d_mul(diff1(e.lhs()), e.rhs()), d_mul(e.lhs(), diff1(e.rhs())));
            return d_div(num, d_pow(e.rhs(), Rational(2)));
        }
        case Kind::Neg: return d_neg(diff1(e.arg()));
        case Kind::Pow: {
            const Rational& k = e.exponent();
            if (k.is_zero()) return constant(Rational(0));
            return d_mul(d_mul(constant(k), d_pow(e.arg(), k - 1)), diff1(e.arg()));
        }
        case Kind::Sin: return d_mul(cos(e.arg()), diff1(e.arg()));
        case Kind::Cos: return d_mul(d_neg(sin(e.arg())), diff1(e.arg()));
        case Kind::Sqrt: return d_div(diff1(e.arg()), d_mul(constant(Rational(2)), e));
        case Kind::Exp: return d_mul(e, diff1(e.arg()));
    }
    return constant(Rational(0));
}

}  // namespace detail

/// Symbolic derivative of order 1 or 2.
inline Expr diff(const Expr& e, int order = 1) {
    if (order != 1 && order != 2) throw SpecError("derivative order must be 1 or 2");
    Expr d = detail::diff1(e);
    return order == 2 ? detail::diff1(d) : d;
}

/// Value and first two derivatives of a profile, precomputed once.
struct Profile {
    Expr f;
    Expr d1;
    Expr d2;

    explicit Profile(Expr e) : f(std::move(e)), d1(diff(f, 1)), d2(diff(d1, 1)) {}
    explicit Profile(std::string_view text) : Profile(parse(text)) {}

    struct Values {
        double v, d1, d2;
    };
    Values at(double r) const { return {eval(f, r), eval(d1, r), eval(d2, r)}; }
};

}  // namespace ricci_forge::exprs
