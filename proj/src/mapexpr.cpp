#include "pvc/mapexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "pvc/errors.hpp"

namespace pvc {

namespace {

NodePtr make_leaf(NodeKind kind, cplx value = {}, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->value = value;
    n->name = std::move(name);
    return n;
}

NodePtr make_unary(NodeKind kind, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(arg);
    return n;
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_int_pow(NodePtr base, int exponent) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::IntPow;
    n->exponent = exponent;
    n->lhs = std::move(base);
    return n;
}

const std::map<std::string_view, NodeKind>& function_table() {
    static const std::map<std::string_view, NodeKind> table{
        {"tan", NodeKind::Tan}, {"sin", NodeKind::Sin}, {"cos", NodeKind::Cos},
        {"exp", NodeKind::Exp}, {"log", NodeKind::Log}, {"sqrt", NodeKind::Sqrt},
    };
    return table;
}

// Recursive-descent parser over the grammar in the header.
class Parser {
public:
    Parser(std::string_view text, const ParamMap& params) : text_(text), params_(params) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("end of input", "unexpected trailing input");
        if (!unbound_.empty()) throw UnboundParameterError({unbound_.begin(), unbound_.end()});
        return e;
    }

    bool saw_variable() const { return saw_variable_; }
    const std::set<std::string>& used_params() const { return used_; }

private:
    [[noreturn]] void fail(const std::string& expected, const std::string& msg) const {
        throw ParseError(pos_, expected, msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(NodeKind::Add, lhs, term());
            else if (accept('-'))
                lhs = make_binary(NodeKind::Sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(NodeKind::Mul, lhs, factor());
            else if (accept('/'))
                lhs = make_binary(NodeKind::Div, lhs, factor());
            else
                return lhs;
        }
    }

    NodePtr factor() {
        NodePtr b = base();
        if (!accept('^')) return b;
        skip_ws();
        // Integer literal exponent -> exact integer power.
        const std::size_t start = pos_;
        std::size_t p = pos_;
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        const bool integral = p > start && (p == text_.size() || (text_[p] != '.' && text_[p] != 'e' &&
                                                                   text_[p] != 'E'));
        if (integral) {
            int value = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + p, value);
            if (ec != std::errc{} || value > 4096) fail("integer exponent <= 4096", "exponent out of range");
            pos_ = p;
            return make_int_pow(b, value);
        }
        NodePtr e = base();
        return make_binary(NodeKind::Pow, b, e);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc{} || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("number", "malformed number");
        }
        // Implicit multiplication such as "2z" is rejected explicitly.
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '(' ||
                                    text_[pos_] == '_'))
            fail("operator", "implicit multiplication is not allowed");
        return make_leaf(NodeKind::Literal, v, std::string(text_.substr(start, pos_ - start)));
    }

    NodePtr base() {
        skip_ws();
        if (pos_ >= text_.size()) fail("number, name, '(' or '-'", "unexpected end of input");
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return make_unary(NodeKind::Neg, base());
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("')'", "unbalanced parenthesis");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view ident = text_.substr(start, pos_ - start);
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                auto it = function_table().find(ident);
                if (it == function_table().end()) {
                    pos_ = start;
                    fail("one of tan sin cos exp log sqrt", "unknown function '" + std::string(ident) + "'");
                }
                ++pos_;
                NodePtr arg = expr();
                if (!accept(')')) fail("')'", "unbalanced parenthesis");
                return make_unary(it->second, arg);
            }
            if (ident == "z") {
                saw_variable_ = true;
                return make_leaf(NodeKind::Variable);
            }
            if (ident == "i") return make_leaf(NodeKind::Literal, cplx(0.0, 1.0), "i");
            if (ident == "pi") return make_leaf(NodeKind::Literal, kPi, "pi");
            if (function_table().count(ident)) {
                pos_ = start + ident.size();
                fail("'('", "function name used without arguments");
            }
            std::string name(ident);
            auto p = params_.find(name);
            if (p == params_.end()) {
                unbound_.insert(name);
                return make_leaf(NodeKind::Param, cplx{}, name);
            }
            used_.insert(name);
            return make_leaf(NodeKind::Param, p->second, name);
        }
        fail("number, name, '(' or '-'", std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    const ParamMap& params_;
    std::size_t pos_ = 0;
    bool saw_variable_ = false;
    std::set<std::string> unbound_;
    std::set<std::string> used_;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Variable: out += "z"; return;
        case NodeKind::Literal:
            if (n.name == "i" || n.name == "pi")
                out += n.name;
            else
                out += format_double(n.value.real());
            return;
        case NodeKind::Param: out += n.name; return;
        case NodeKind::Neg:
            out += "(-";
            print_node(*n.lhs, out);
            out += ")";
            return;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div: {
            const char op = n.kind == NodeKind::Add ? '+' : n.kind == NodeKind::Sub ? '-' : n.kind == NodeKind::Mul ? '*' : '/';
            out += "(";
            print_node(*n.lhs, out);
            out += ' ';
            out += op;
            out += ' ';
            print_node(*n.rhs, out);
            out += ")";
            return;
        }
        case NodeKind::IntPow:
            out += "(";
            print_node(*n.lhs, out);
            out += "^" + std::to_string(n.exponent) + ")";
            return;
        case NodeKind::Pow:
            out += "(";
            print_node(*n.lhs, out);
            out += "^(";
            print_node(*n.rhs, out);
            out += "))";
            return;
        default: break;
    }
    for (const auto& [name, kind] : function_table()) {
        if (kind == n.kind) {
            out += name;
            out += "(";
            print_node(*n.lhs, out);
            out += ")";
            return;
        }
    }
}

// ------------------------------------------------------------ evaluation

constexpr double kEps = std::numeric_limits<double>::epsilon();

cplx checked(cplx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DomainError(std::string("non-finite value in ") + what);
    return v;
}

cplx cpow_int(cplx base, int e) {
    cplx result = 1.0;
    cplx b = base;
    int n = e;
    while (n > 0) {
        if (n & 1) result *= b;
        b *= b;
        n >>= 1;
    }
    return result;
}

// Principal branch u^w = exp(w log u), arg in (-pi, pi].
cplx cpow_principal(cplx u, cplx w) {
    if (u == cplx{}) {
        if (w.real() > 0.0) return 0.0;
        throw DomainError("power: zero base with non-positive exponent");
    }
    return std::exp(w * std::log(u));
}

void check_cos_pole(cplx u, const char* what) {
    const cplx c = std::cos(u);
    if (std::abs(c) <= 4.0 * kEps * std::max(1.0, std::abs(u)))
        throw DomainError(std::string(what) + ": argument at a pole");
}

cplx eval_node(const Node& n, cplx z) {
    switch (n.kind) {
        case NodeKind::Variable: return z;
        case NodeKind::Literal:
        case NodeKind::Param: return n.value;
        case NodeKind::Neg: return -eval_node(*n.lhs, z);
        case NodeKind::Add: return eval_node(*n.lhs, z) + eval_node(*n.rhs, z);
        case NodeKind::Sub: return eval_node(*n.lhs, z) - eval_node(*n.rhs, z);
        case NodeKind::Mul: return eval_node(*n.lhs, z) * eval_node(*n.rhs, z);
        case NodeKind::Div: {
            const cplx d = eval_node(*n.rhs, z);
            if (d == cplx{}) throw DomainError("division by zero");
            return checked(eval_node(*n.lhs, z) / d, "division");
        }
        case NodeKind::IntPow: return checked(cpow_int(eval_node(*n.lhs, z), n.exponent), "power");
        case NodeKind::Pow: return checked(cpow_principal(eval_node(*n.lhs, z), eval_node(*n.rhs, z)), "power");
        case NodeKind::Tan: {
            const cplx u = eval_node(*n.lhs, z);
            check_cos_pole(u, "tan");
            return checked(std::tan(u), "tan");
        }
        case NodeKind::Sin: return checked(std::sin(eval_node(*n.lhs, z)), "sin");
        case NodeKind::Cos: return checked(std::cos(eval_node(*n.lhs, z)), "cos");
        case NodeKind::Exp: return checked(std::exp(eval_node(*n.lhs, z)), "exp");
        case NodeKind::Log: {
            const cplx u = eval_node(*n.lhs, z);
            if (u == cplx{}) throw DomainError("log: argument is zero");
            return std::log(u);
        }
        case NodeKind::Sqrt: return std::sqrt(eval_node(*n.lhs, z));
    }
    throw DomainError("malformed expression node");
}

// ------------------------------------------------------- series propagation

// f(u0 + v) for v with zero constant term, given the Maclaurin series of the
// shifted function.
UniSeries shifted(const UniSeries& u, const UniSeries& outer_at_u0) {
    const UniSeries v = u + (-u[0]);
    return compose(outer_at_u0, v);
}

UniSeries taylor_node(const Node& n, cplx c, std::size_t order) {
    switch (n.kind) {
        case NodeKind::Variable: {
            UniSeries s = UniSeries::variable(order);
            return s + c;
        }
        case NodeKind::Literal:
        case NodeKind::Param: return UniSeries::constant(n.value, order);
        case NodeKind::Neg: return -taylor_node(*n.lhs, c, order);
        case NodeKind::Add: return taylor_node(*n.lhs, c, order) + taylor_node(*n.rhs, c, order);
        case NodeKind::Sub: return taylor_node(*n.lhs, c, order) - taylor_node(*n.rhs, c, order);
        case NodeKind::Mul: return taylor_node(*n.lhs, c, order) * taylor_node(*n.rhs, c, order);
        case NodeKind::Div: {
            const UniSeries d = taylor_node(*n.rhs, c, order);
            if (d[0] == cplx{}) throw DomainError("division by zero at expansion center");
            return taylor_node(*n.lhs, c, order) / d;
        }
        case NodeKind::IntPow: {
            const UniSeries b = taylor_node(*n.lhs, c, order);
            UniSeries result = UniSeries::constant(1.0, order);
            UniSeries sq = b;
            for (int e = n.exponent; e > 0; e >>= 1) {
                if (e & 1) result = result * sq;
                if (e > 1) sq = sq * sq;
            }
            return result;
        }
        case NodeKind::Pow: {
            const UniSeries u = taylor_node(*n.lhs, c, order);
            const UniSeries w = taylor_node(*n.rhs, c, order);
            if (u[0] == cplx{}) throw DomainError("power: branch point at expansion center");
            // u^w = exp(w log u)
            return exp(w * log_unit(u));
        }
        case NodeKind::Exp: return exp(taylor_node(*n.lhs, c, order));
        case NodeKind::Log: {
            const UniSeries u = taylor_node(*n.lhs, c, order);
            if (u[0] == cplx{}) throw DomainError("log: argument is zero at expansion center");
            return log_unit(u);
        }
        case NodeKind::Sqrt: {
            const UniSeries u = taylor_node(*n.lhs, c, order);
            const cplx u0 = u[0];
            if (u0 == cplx{}) throw DomainError("sqrt: branch point at expansion center");
            // sqrt(u0) (1 + v/u0)^(1/2)
            return std::sqrt(u0) * compose(binomial_series(0.5, order), (1.0 / u0) * (u + (-u0)));
        }
        case NodeKind::Sin:
        case NodeKind::Cos:
        case NodeKind::Tan: {
            const UniSeries u = taylor_node(*n.lhs, c, order);
            const cplx u0 = u[0];
            const UniSeries sv = shifted(u, sin_series(order));
            const UniSeries cv = shifted(u, cos_series(order));
            // sin(u0 + v) = sin u0 cos v + cos u0 sin v, cos(u0 + v) = cos u0 cos v - sin u0 sin v
            const UniSeries s = std::sin(u0) * cv + std::cos(u0) * sv;
            const UniSeries co = std::cos(u0) * cv - std::sin(u0) * sv;
            if (n.kind == NodeKind::Sin) return s;
            if (n.kind == NodeKind::Cos) return co;
            check_cos_pole(u0, "tan");
            return s / co;
        }
    }
    throw DomainError("malformed expression node");
}

bool contains_variable(const Node& n) {
    if (n.kind == NodeKind::Variable) return true;
    return (n.lhs && contains_variable(*n.lhs)) || (n.rhs && contains_variable(*n.rhs));
}

}  // namespace

MapExpr::MapExpr() : root_(make_leaf(NodeKind::Variable)) {}

MapExpr::MapExpr(NodePtr root, ParamMap params) : root_(std::move(root)), params_(std::move(params)) {}

std::string MapExpr::print() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

MapExpr parse(std::string_view text, const ParamMap& params) {
    Parser p(text, params);
    NodePtr root = p.parse_all();
    ParamMap used;
    for (const auto& name : p.used_params()) used.emplace(name, params.find(name)->second);
    return MapExpr(std::move(root), std::move(used));
}

cplx parse_constant(std::string_view text) {
    const MapExpr e = parse(text);
    if (contains_variable(e.root())) throw ParseError(0, "constant expression", "constant must not contain z");
    return eval(e, 0.0);
}

cplx eval(const MapExpr& expr, cplx z) { return checked(eval_node(expr.root(), z), "expression"); }

UniSeries taylor(const MapExpr& expr, cplx center, std::size_t order) {
    UniSeries s = taylor_node(expr.root(), center, order);
    for (cplx c : s.coeffs())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw DomainError("non-finite Taylor coefficient");
    return s;
}

}  // namespace pvc
