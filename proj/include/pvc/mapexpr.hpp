#pragma once

// Analytic expressions in one complex variable z, used to define conformal
// maps phi: Omega -> unit disc.
//
// Grammar (whitespace insignificant):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' exponent)?
//   exponent := integer | base        (a non-integer exponent is a principal-branch power)
//   base   := number | 'i' | 'pi' | 'z' | ident | ident '(' expr ')' | '(' expr ')' | '-' base
// Functions: tan sin cos exp log sqrt. "2z" is a syntax error; write "2*z".

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pvc/series.hpp"
#include "pvc/types.hpp"

namespace pvc {

using ParamMap = std::map<std::string, cplx, std::less<>>;

enum class NodeKind {
    Variable,
    Literal,
    Param,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    IntPow,
    Pow,
    Tan,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
};

struct Node {
    NodeKind kind;
    cplx value{};       // Literal value, or bound Param value
    std::string name;   // Param name, or the printed spelling of a Literal ("pi", "i")
    int exponent = 0;   // IntPow
    std::shared_ptr<const Node> lhs, rhs;
};

using NodePtr = std::shared_ptr<const Node>;

/// Immutable parsed expression. Safe to share across threads.
class MapExpr {
public:
    /// The identity map z.
    MapExpr();
    MapExpr(NodePtr root, ParamMap params);

    const Node& root() const noexcept { return *root_; }
    const ParamMap& params() const noexcept { return params_; }

    /// Fully parenthesized text that parses back to the same tree.
    std::string print() const;

private:
    NodePtr root_;
    ParamMap params_;
};

/// Parses `text`; every free name must be a key of `params`.
/// Throws ParseError or UnboundParameterError.
MapExpr parse(std::string_view text, const ParamMap& params = {});

/// Parses a constant expression (no z, no parameters) and returns its value.
cplx parse_constant(std::string_view text);

/// Value at z. Throws DomainError at poles and branch points.
cplx eval(const MapExpr& expr, cplx z);

/// Taylor coefficients c_0..c_order at `center`, propagated through the tree.
UniSeries taylor(const MapExpr& expr, cplx center, std::size_t order);

}  // namespace pvc
