#include "web4/expr.hpp"

#include "web4/errors.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace web4 {

Expr::Expr() : node_(std::make_shared<const Node>(Literal{"0"})) {}

Expr Expr::variable(Axis axis) { return Expr(std::make_shared<const Node>(Variable{axis})); }
Expr Expr::literal(std::string text) {
    return Expr(std::make_shared<const Node>(Literal{std::move(text)}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}
Expr Expr::power(Expr base, long exponent) {
    return Expr(std::make_shared<const Node>(Power{std::move(base), exponent}));
}
Expr Expr::negate(Expr operand) {
    return Expr(std::make_shared<const Node>(Negate{std::move(operand)}));
}
Expr Expr::call(Function fn, Expr arg) {
    return Expr(std::make_shared<const Node>(Call{fn, std::move(arg)}));
}

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const auto& na = a.node();
    const auto& nb = b.node();
    if (na.index() != nb.index()) return false;
    return std::visit(
        overloaded{
            [&](const Expr::Variable& v) { return v.axis == std::get<Expr::Variable>(nb).axis; },
            [&](const Expr::Literal& v) { return v.text == std::get<Expr::Literal>(nb).text; },
            [&](const Expr::Binary& v) {
                const auto& w = std::get<Expr::Binary>(nb);
                return v.op == w.op && v.lhs == w.lhs && v.rhs == w.rhs;
            },
            [&](const Expr::Power& v) {
                const auto& w = std::get<Expr::Power>(nb);
                return v.exponent == w.exponent && v.base == w.base;
            },
            [&](const Expr::Negate& v) { return v.operand == std::get<Expr::Negate>(nb).operand; },
            [&](const Expr::Call& v) {
                const auto& w = std::get<Expr::Call>(nb);
                return v.fn == w.fn && v.arg == w.arg;
            },
        },
        na);
}

bool Expr::is_rational() const {
    return std::visit(overloaded{
                          [](const Variable&) { return true; },
                          [](const Literal&) { return true; },
                          [](const Binary& b) { return b.lhs.is_rational() && b.rhs.is_rational(); },
                          [](const Power& p) { return p.base.is_rational(); },
                          [](const Negate& n) { return n.operand.is_rational(); },
                          [](const Call&) { return false; },
                      },
                      node());
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t offset;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::end: return "end of input";
        case Tok::number: return "number '" + std::string(t.text) + "'";
        case Tok::ident: return "identifier '" + std::string(t.text) + "'";
        default: return "'" + std::string(t.text) + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::end, {}, start};
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            return {Tok::ident, src_.substr(start, pos_ - start), start};
        }
        ++pos_;
        const auto one = src_.substr(start, 1);
        switch (c) {
            case '+': return {Tok::plus, one, start};
            case '-': return {Tok::minus, one, start};
            case '*': return {Tok::star, one, start};
            case '/': return {Tok::slash, one, start};
            case '^': return {Tok::caret, one, start};
            case '(': return {Tok::lparen, one, start};
            case ')': return {Tok::rparen, one, start};
            default:
                throw ParseError(start, "an operand or operator",
                                 "character '" + std::string(one) + "'");
        }
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError(start, "a digit", "'.'");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // 'e' belongs to whatever follows
        }
        return {Tok::number, src_.substr(start, pos_ - start), start};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

std::optional<Function> function_named(std::string_view name) {
    if (name == "exp") return Function::exp;
    if (name == "ln") return Function::ln;
    if (name == "sin") return Function::sin;
    if (name == "cos") return Function::cos;
    if (name == "sqrt") return Function::sqrt;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    Expr parse_all() {
        Expr e = expr();
        if (cur_.kind != Tok::end) fail("an operator or end of input");
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(cur_.offset, expected, describe(cur_));
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(what);
        advance();
    }

    Expr expr() {
        Expr lhs = term();
        while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
            const BinaryOp op = cur_.kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
            advance();
            lhs = Expr::binary(op, lhs, term());
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = factor();
        while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
            const BinaryOp op = cur_.kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
            advance();
            lhs = Expr::binary(op, lhs, factor());
        }
        return lhs;
    }

    Expr factor() {
        if (cur_.kind == Tok::minus) {
            advance();
            return Expr::negate(factor());
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (cur_.kind != Tok::caret) return base;
        advance();
        return Expr::power(base, exponent());
    }

    // Exponents are integer literals; a chain 2^3^2 folds right-associatively.
    long exponent() {
        bool negative = false;
        if (cur_.kind == Tok::minus) {
            negative = true;
            advance();
        }
        const std::size_t offset = cur_.offset;
        long value = integer();
        if (cur_.kind == Tok::caret) {
            advance();
            const long rhs = exponent();
            if (rhs < 0) throw ParseError(offset, "a non-negative inner exponent", "negative exponent");
            long folded = 1;
            for (long k = 0; k < rhs; ++k) {
                folded *= value;
                if (folded > kMaxExponent || folded < -kMaxExponent) break;
            }
            value = folded;
        }
        if (value > kMaxExponent) {
            throw ParseError(offset, "an exponent of magnitude at most " + std::to_string(kMaxExponent),
                             "exponent " + std::to_string(value));
        }
        return negative ? -value : value;
    }

    long integer() {
        if (cur_.kind != Tok::number) fail("an integer exponent");
        long value = 0;
        const auto text = cur_.text;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) fail("an integer exponent");
        advance();
        return value;
    }

    static constexpr long kMaxExponent = 4096;

    Expr atom() {
        switch (cur_.kind) {
            case Tok::number: {
                Expr e = Expr::literal(std::string(cur_.text));
                advance();
                return e;
            }
            case Tok::lparen: {
                advance();
                Expr e = expr();
                expect(Tok::rparen, "')'");
                return e;
            }
            case Tok::ident: {
                if (cur_.text == "x" || cur_.text == "y") {
                    Expr e = Expr::variable(cur_.text == "x" ? Axis::x : Axis::y);
                    advance();
                    return e;
                }
                const auto fn = function_named(cur_.text);
                if (!fn) fail("x, y or one of exp, ln, sin, cos, sqrt");
                advance();
                expect(Tok::lparen, "'(' after function name");
                Expr arg = expr();
                expect(Tok::rparen, "')'");
                return Expr::call(*fn, arg);
            }
            default: fail("a number, variable, function call or '('");
        }
    }

    Lexer lexer_;
    Token cur_{};
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

char op_char(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return '+';
        case BinaryOp::sub: return '-';
        case BinaryOp::mul: return '*';
        case BinaryOp::div: return '/';
    }
    return '?';
}

}  // namespace

std::string render(const Expr& e) {
    return std::visit(
        overloaded{
            [](const Expr::Variable& v) { return std::string(v.axis == Axis::x ? "x" : "y"); },
            [](const Expr::Literal& v) { return v.text; },
            [](const Expr::Binary& b) {
                return "(" + render(b.lhs) + " " + op_char(b.op) + " " + render(b.rhs) + ")";
            },
            [](const Expr::Power& p) {
                // Binary nodes already carry their own parentheses.
                const bool wrap = std::holds_alternative<Expr::Negate>(p.base.node()) ||
                                  std::holds_alternative<Expr::Power>(p.base.node());
                const std::string base = wrap ? "(" + render(p.base) + ")" : render(p.base);
                return base + "^" + std::to_string(p.exponent);
            },
            [](const Expr::Negate& n) { return "-" + render(n.operand); },
            [](const Expr::Call& c) {
                return std::string(to_string(c.fn)) + "(" + render(c.arg) + ")";
            },
        },
        e.node());
}

// ---------------------------------------------------------------------------
// Evaluation

template <Scalar S>
Jet<S> eval_jet(const Expr& e, const Point<S>& base, int order) {
    return std::visit(
        overloaded{
            [&](const Expr::Variable& v) {
                return Jet<S>::variable(v.axis, v.axis == Axis::x ? base.x : base.y, order);
            },
            [&](const Expr::Literal& v) {
                return Jet<S>::constant(from_decimal<S>(v.text), order);
            },
            [&](const Expr::Binary& b) {
                Jet<S> l = eval_jet(b.lhs, base, order);
                Jet<S> r = eval_jet(b.rhs, base, order);
                switch (b.op) {
                    case BinaryOp::add: return l + r;
                    case BinaryOp::sub: return l - r;
                    case BinaryOp::mul: return l * r;
                    case BinaryOp::div: return l / r;
                }
                return l;
            },
            [&](const Expr::Power& p) { return ipow(eval_jet(p.base, base, order), p.exponent); },
            [&](const Expr::Negate& n) { return -eval_jet(n.operand, base, order); },
            [&](const Expr::Call& c) { return apply(c.fn, eval_jet(c.arg, base, order)); },
        },
        e.node());
}

template Jet<double> eval_jet(const Expr&, const Point<double>&, int);
template Jet<Rational> eval_jet(const Expr&, const Point<Rational>&, int);

}  // namespace web4
