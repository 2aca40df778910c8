#ifndef CONJSCAN_EXPRESSION_HPP
#define CONJSCAN_EXPRESSION_HPP

#include "conjscan/errors.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <utility>

namespace conjscan {

/// Closed-form scalar expressions over {x, xi, constants, +, -, *, /,
/// sin, cos, exp, pow}. Immutable tree; supports evaluation, symbolic
/// differentiation, and canonical printing (used for problem digests).
class Expr {
public:
    enum class Kind { constant, var_x, var_xi, add, sub, mul, div, neg, sin, cos, exp, pow };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v) { return Expr(std::make_shared<Node>(Kind::constant, v)); }
    static Expr x() { return Expr(std::make_shared<Node>(Kind::var_x, 0.0)); }
    static Expr xi() { return Expr(std::make_shared<Node>(Kind::var_xi, 0.0)); }

    static Expr add(Expr a, Expr b) { return binary(Kind::add, std::move(a), std::move(b)); }
    static Expr sub(Expr a, Expr b) { return binary(Kind::sub, std::move(a), std::move(b)); }
    static Expr mul(Expr a, Expr b) { return binary(Kind::mul, std::move(a), std::move(b)); }
    static Expr div(Expr a, Expr b) { return binary(Kind::div, std::move(a), std::move(b)); }
    static Expr neg(Expr a) { return unary(Kind::neg, std::move(a)); }
    static Expr sin(Expr a) { return unary(Kind::sin, std::move(a)); }
    static Expr cos(Expr a) { return unary(Kind::cos, std::move(a)); }
    static Expr exp(Expr a) { return unary(Kind::exp, std::move(a)); }
    static Expr pow(Expr base, Expr exponent) {
        return binary(Kind::pow, std::move(base), std::move(exponent));
    }

    double eval(double x, double xi = 0.0) const { return node_->eval(x, xi); }

    bool depends_on_x() const { return node_->depends(Kind::var_x); }
    bool depends_on_xi() const { return node_->depends(Kind::var_xi); }

    /// d/dx or d/dxi. Exponents of pow must be variable-free.
    Expr derivative(Kind var) const { return Expr(node_->derivative(var)); }
    Expr derivative_x() const { return derivative(Kind::var_x); }
    Expr derivative_xi() const { return derivative(Kind::var_xi); }

    std::string to_string() const { return node_->print(); }

    /// Parses an expression; `allow_xi` admits the second variable.
    static Expr parse(const std::string& text, bool allow_xi = false);

private:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    explicit Expr(NodePtr n) : node_(std::move(n)) {}

    static Expr binary(Kind k, Expr a, Expr b) {
        return Expr(std::make_shared<Node>(k, a.node_, b.node_));
    }
    static Expr unary(Kind k, Expr a) { return Expr(std::make_shared<Node>(k, a.node_)); }

    struct Node {
        Kind kind;
        double value = 0.0;
        NodePtr lhs, rhs;

        Node(Kind k, double v) : kind(k), value(v) {}
        Node(Kind k, NodePtr a) : kind(k), lhs(std::move(a)) {}
        Node(Kind k, NodePtr a, NodePtr b) : kind(k), lhs(std::move(a)), rhs(std::move(b)) {}

        double eval(double x, double xi) const {
            switch (kind) {
                case Kind::constant: return value;
                case Kind::var_x: return x;
                case Kind::var_xi: return xi;
                case Kind::add: return lhs->eval(x, xi) + rhs->eval(x, xi);
                case Kind::sub: return lhs->eval(x, xi) - rhs->eval(x, xi);
                case Kind::mul: return lhs->eval(x, xi) * rhs->eval(x, xi);
                case Kind::div: return lhs->eval(x, xi) / rhs->eval(x, xi);
                case Kind::neg: return -lhs->eval(x, xi);
                case Kind::sin: return std::sin(lhs->eval(x, xi));
                case Kind::cos: return std::cos(lhs->eval(x, xi));
                case Kind::exp: return std::exp(lhs->eval(x, xi));
                case Kind::pow: return std::pow(lhs->eval(x, xi), rhs->eval(x, xi));
            }
            return 0.0;
        }

        bool depends(Kind var) const {
            if (kind == var) return true;
            if (lhs && lhs->depends(var)) return true;
            if (rhs && rhs->depends(var)) return true;
            return false;
        }

        bool is_const(double v) const { return kind == Kind::constant && value == v; }

        static NodePtr make_const(double v) { return std::make_shared<Node>(Kind::constant, v); }

        static NodePtr simplified(Kind k, NodePtr a, NodePtr b) {
            // Light folding keeps derivative trees small.
            if (a && a->kind == Kind::constant && b && b->kind == Kind::constant) {
                Node tmp(k, a, b);
                return make_const(tmp.eval(0.0, 0.0));
            }
            switch (k) {
                case Kind::add:
                    if (a->is_const(0.0)) return b;
                    if (b->is_const(0.0)) return a;
                    break;
                case Kind::sub:
                    if (b->is_const(0.0)) return a;
                    break;
                case Kind::mul:
                    if (a->is_const(0.0) || b->is_const(0.0)) return make_const(0.0);
                    if (a->is_const(1.0)) return b;
                    if (b->is_const(1.0)) return a;
                    break;
                case Kind::div:
                    if (a->is_const(0.0)) return make_const(0.0);
                    if (b->is_const(1.0)) return a;
                    break;
                default:
                    break;
            }
            return std::make_shared<Node>(k, std::move(a), std::move(b));
        }

        static NodePtr simplified_unary(Kind k, NodePtr a) {
            if (a->kind == Kind::constant) {
                Node tmp(k, a);
                return make_const(tmp.eval(0.0, 0.0));
            }
            return std::make_shared<Node>(k, std::move(a));
        }

        NodePtr derivative(Kind var) const {
            switch (kind) {
                case Kind::constant: return make_const(0.0);
                case Kind::var_x: return make_const(var == Kind::var_x ? 1.0 : 0.0);
                case Kind::var_xi: return make_const(var == Kind::var_xi ? 1.0 : 0.0);
                case Kind::add: return simplified(Kind::add, lhs->derivative(var), rhs->derivative(var));
                case Kind::sub: return simplified(Kind::sub, lhs->derivative(var), rhs->derivative(var));
                case Kind::mul:
                    return simplified(Kind::add,
                                      simplified(Kind::mul, lhs->derivative(var), rhs),
                                      simplified(Kind::mul, lhs, rhs->derivative(var)));
                case Kind::div:
                    return simplified(
                        Kind::div,
                        simplified(Kind::sub,
                                   simplified(Kind::mul, lhs->derivative(var), rhs),
                                   simplified(Kind::mul, lhs, rhs->derivative(var))),
                        simplified(Kind::mul, rhs, rhs));
                case Kind::neg: return simplified_unary(Kind::neg, lhs->derivative(var));
                case Kind::sin:
                    return simplified(Kind::mul, simplified_unary(Kind::cos, lhs),
                                      lhs->derivative(var));
                case Kind::cos:
                    return simplified(
                        Kind::mul,
                        simplified_unary(Kind::neg, simplified_unary(Kind::sin, lhs)),
                        lhs->derivative(var));
                case Kind::exp:
                    return simplified(Kind::mul, std::make_shared<Node>(Kind::exp, lhs),
                                      lhs->derivative(var));
                case Kind::pow: {
                    if (rhs->depends(Kind::var_x) || rhs->depends(Kind::var_xi))
                        throw Error(ErrorCode::derivative_unavailable,
                                    "pow with non-constant exponent has no supported derivative");
                    Node cexp(Kind::constant, 0.0);
                    double c = rhs->eval(0.0, 0.0);
                    // d(u^c) = c * u^(c-1) * u'
                    return simplified(
                        Kind::mul, make_const(c),
                        simplified(Kind::mul,
                                   simplified(Kind::pow, lhs, make_const(c - 1.0)),
                                   lhs->derivative(var)));
                }
            }
            return make_const(0.0);
        }

        std::string print() const {
            auto num = [](double v) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                return std::string(buf);
            };
            switch (kind) {
                case Kind::constant: return num(value);
                case Kind::var_x: return "x";
                case Kind::var_xi: return "xi";
                case Kind::add: return "(" + lhs->print() + "+" + rhs->print() + ")";
                case Kind::sub: return "(" + lhs->print() + "-" + rhs->print() + ")";
                case Kind::mul: return "(" + lhs->print() + "*" + rhs->print() + ")";
                case Kind::div: return "(" + lhs->print() + "/" + rhs->print() + ")";
                case Kind::neg: return "(-" + lhs->print() + ")";
                case Kind::sin: return "sin(" + lhs->print() + ")";
                case Kind::cos: return "cos(" + lhs->print() + ")";
                case Kind::exp: return "exp(" + lhs->print() + ")";
                case Kind::pow: return "pow(" + lhs->print() + "," + rhs->print() + ")";
            }
            return "?";
        }
    };

    NodePtr node_;

    // ---- recursive-descent parser ----
    struct Parser {
        const std::string& s;
        size_t pos = 0;
        bool allow_xi;

        Parser(const std::string& text, bool xi_ok) : s(text), allow_xi(xi_ok) {}

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) { ++pos; return true; }
            return false;
        }
        char peek() {
            skip_ws();
            return pos < s.size() ? s[pos] : '\0';
        }
        [[noreturn]] void fail(const std::string& what) {
            throw Error(ErrorCode::config_error,
                        "expression parse error at position " + std::to_string(pos) + ": " + what +
                            " in \"" + s + "\"");
        }

        Expr parse_expr() {
            Expr lhs = parse_term();
            for (;;) {
                if (eat('+')) lhs = Expr::add(lhs, parse_term());
                else if (eat('-')) lhs = Expr::sub(lhs, parse_term());
                else return lhs;
            }
        }
        Expr parse_term() {
            Expr lhs = parse_factor();
            for (;;) {
                if (eat('*')) lhs = Expr::mul(lhs, parse_factor());
                else if (eat('/')) lhs = Expr::div(lhs, parse_factor());
                else return lhs;
            }
        }
        // '^' binds tighter than unary minus (-x^2 reads -(x^2)) and is
        // right associative; its exponent may itself carry a sign.
        Expr parse_factor() {
            if (eat('-')) return Expr::neg(parse_factor());
            if (eat('+')) return parse_factor();
            return parse_power();
        }
        Expr parse_power() {
            Expr base = parse_primary();
            if (eat('^')) return Expr::pow(base, parse_factor());
            return base;
        }
        Expr parse_primary() {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end of input");
            char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
            if (eat('(')) {
                Expr e = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            fail(std::string("unexpected character '") + c + "'");
        }
        Expr parse_number() {
            size_t start = pos;
            char* end = nullptr;
            double v = std::strtod(s.c_str() + start, &end);
            if (end == s.c_str() + start) fail("malformed number");
            pos = static_cast<size_t>(end - s.c_str());
            return Expr::constant(v);
        }
        Expr parse_ident() {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "x") return Expr::x();
            if (name == "xi") {
                if (!allow_xi) fail("variable 'xi' not allowed in a coefficient expression");
                return Expr::xi();
            }
            if (name == "pi") return Expr::constant(3.14159265358979323846264338327950288);
            if (name == "sin" || name == "cos" || name == "exp") {
                if (!eat('(')) fail("expected '(' after " + name);
                Expr arg = parse_expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "sin") return Expr::sin(arg);
                if (name == "cos") return Expr::cos(arg);
                return Expr::exp(arg);
            }
            if (name == "pow") {
                if (!eat('(')) fail("expected '(' after pow");
                Expr base = parse_expr();
                if (!eat(',')) fail("expected ',' in pow");
                Expr exponent = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return Expr::pow(base, exponent);
            }
            fail("unknown identifier '" + name + "'");
        }
    };
};

inline Expr Expr::parse(const std::string& text, bool allow_xi) {
    Parser p(text, allow_xi);
    Expr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return e;
}

} // namespace conjscan

#endif
