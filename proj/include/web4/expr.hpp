#pragma once

#include "web4/jet.hpp"
#include "web4/scalar.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace web4 {

template <Scalar S>
struct Point {
    S x;
    S y;
};

enum class BinaryOp { add, sub, mul, div };

/// Immutable AST of a web-function formula over x and y.
///
/// Nodes are shared, so copies are cheap and an Expr can be read from many
/// threads at once.
class Expr {
public:
    struct Variable;
    /// Literal kept as its source text so the exact backend can convert it
    /// without going through a double.
    struct Literal;
    struct Binary;
    struct Power;
    struct Negate;
    struct Call;
    using Node = std::variant<Variable, Literal, Binary, Power, Negate, Call>;

    /// The literal 0.
    Expr();

    static Expr variable(Axis axis);
    static Expr literal(std::string text);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr power(Expr base, long exponent);
    static Expr negate(Expr operand);
    static Expr call(Function fn, Expr arg);

    const Node& node() const;

    /// Structural equality.
    friend bool operator==(const Expr& a, const Expr& b);

    /// True when evaluation needs only field operations, so the exact
    /// backend can represent the result.
    bool is_rational() const;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Expr::Variable {
    Axis axis;
};
struct Expr::Literal {
    std::string text;
};
struct Expr::Binary {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};
struct Expr::Power {
    Expr base;
    long exponent;
};
struct Expr::Negate {
    Expr operand;
};
struct Expr::Call {
    Function fn;
    Expr arg;
};

inline const Expr::Node& Expr::node() const { return *node_; }

/// Parses the formula grammar:
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | power
///   power  := atom ('^' exponent)?
///   exponent := ['-'] integer ('^' exponent)?
///   atom   := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
///   func   := 'exp' | 'ln' | 'sin' | 'cos' | 'sqrt'
///
/// Whitespace is ignored. Throws ParseError carrying the byte offset.
Expr parse(std::string_view text);

/// Canonical text form; parse(render(e)) == e.
std::string render(const Expr& e);

/// Jet of e at base, truncated at order.
template <Scalar S>
Jet<S> eval_jet(const Expr& e, const Point<S>& base, int order);

template <Scalar S>
S eval_scalar(const Expr& e, const Point<S>& base) {
    return eval_jet(e, base, 0).value();
}

extern template Jet<double> eval_jet(const Expr&, const Point<double>&, int);
extern template Jet<Rational> eval_jet(const Expr&, const Point<Rational>&, int);

}  // namespace web4
