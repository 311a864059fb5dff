#include "quadent/equation.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "quadent/rng.hpp"

namespace quadent::equation {

using arith::Elem;
using arith::PrimeField;
using arith::ReducedFraction;

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + msg
                                  : msg),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Expression nodes

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::optional<Rational> make_rational(__int128 num, __int128 den) {
    if (den == 0) return std::nullopt;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num, b = den;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (num > lim || num < -lim || den > lim) return std::nullopt;
    return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::optional<Rational> fold(Expr::Kind k, Rational a, Rational b) {
    using K = Expr::Kind;
    const __int128 an = a.num, ad = a.den, bn = b.num, bd = b.den;
    switch (k) {
        case K::add: return make_rational(an * bd + bn * ad, ad * bd);
        case K::sub: return make_rational(an * bd - bn * ad, ad * bd);
        case K::mul: return make_rational(an * bn, ad * bd);
        case K::div:
            if (bn == 0) return std::nullopt;
            return make_rational(an * bd, ad * bn);
        default: return std::nullopt;
    }
}

}  // namespace

ExprPtr Expr::constant(Rational v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::constant;
    const std::int64_t g = gcd64(v.num, v.den);
    if (v.den < 0) {
        v.num = -v.num;
        v.den = -v.den;
    }
    if (g > 1) {
        v.num /= g;
        v.den /= g;
    }
    e->value = v;
    return e;
}

ExprPtr Expr::param(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::param;
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::corner_var(int c) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::corner;
    e->corner = c;
    return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr a, ExprPtr b) {
    if (a->kind == Kind::constant && b->kind == Kind::constant) {
        if (auto r = fold(k, a->value, b->value)) return constant(*r);
    }
    switch (k) {
        case Kind::add:
            if (a->is_constant(0)) return b;
            if (b->is_constant(0)) return a;
            break;
        case Kind::sub:
            if (b->is_constant(0)) return a;
            if (a->is_constant(0)) return negate(b);
            break;
        case Kind::mul:
            if (a->is_constant(0) || b->is_constant(0)) return constant(0);
            if (a->is_constant(1)) return b;
            if (b->is_constant(1)) return a;
            break;
        case Kind::div:
            if (b->is_constant(1)) return a;
            if (a->is_constant(0) && !b->is_constant(0)) return constant(0);
            break;
        default: throw std::logic_error("binary() with non-binary kind");
    }
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr Expr::negate(ExprPtr a) {
    if (a->kind == Kind::constant) return constant(Rational{-a->value.num, a->value.den});
    if (a->kind == Kind::neg) return a->lhs;
    auto e = std::make_shared<Expr>();
    e->kind = Kind::neg;
    e->lhs = std::move(a);
    return e;
}

ExprPtr Expr::power(ExprPtr a, int n) {
    if (n == 0) return constant(1);
    if (n == 1) return a;
    auto e = std::make_shared<Expr>();
    e->kind = Kind::pow;
    e->lhs = std::move(a);
    e->exponent = n;
    return e;
}

bool mentions_corner(const Expr& e) {
    if (e.kind == Expr::Kind::corner) return true;
    if (e.lhs && mentions_corner(*e.lhs)) return true;
    return e.rhs && mentions_corner(*e.rhs);
}

std::string to_string(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::constant:
            return e.value.den == 1 ? std::to_string(e.value.num)
                                    : "(" + std::to_string(e.value.num) + "/" +
                                          std::to_string(e.value.den) + ")";
        case K::param: return e.name;
        case K::corner: return std::string(kCornerNames[e.corner]);
        case K::add: return "(" + to_string(*e.lhs) + " + " + to_string(*e.rhs) + ")";
        case K::sub: return "(" + to_string(*e.lhs) + " - " + to_string(*e.rhs) + ")";
        case K::mul: return to_string(*e.lhs) + "*" + to_string(*e.rhs);
        case K::div: return to_string(*e.lhs) + "/" + to_string(*e.rhs);
        case K::neg: return "-" + to_string(*e.lhs);
        case K::pow: return to_string(*e.lhs) + "^" + std::to_string(e.exponent);
    }
    return "?";
}

const ParameterRule* ParameterEnv::find(std::string_view name) const {
    for (const auto& r : rules)
        if (r.name == name) return &r;
    return nullptr;
}

std::vector<std::string> ParameterEnv::free_names() const {
    std::vector<std::string> out;
    for (const auto& r : rules)
        if (r.kind == ParameterRule::Kind::free) out.push_back(r.name);
    return out;
}

int QuadRelationSpec::nonzero_count() const {
    return static_cast<int>(std::count(nonzero.begin(), nonzero.end(), true));
}

// ---------------------------------------------------------------------------
// Field evaluation of parameter expressions

namespace {

struct FieldOps {
    const PrimeField& F;
    const std::map<std::string, Elem>& params;
    const std::array<Elem, 4>* corners = nullptr;

    Elem constant(Rational r) const { return F.from_ratio(r.num, r.den); }
    Elem param(const std::string& n) const {
        auto it = params.find(n);
        if (it == params.end()) throw std::logic_error("unbound parameter " + n);
        return it->second;
    }
    Elem corner(int c) const {
        if (!corners) throw std::logic_error("corner symbol in parameter expression");
        return (*corners)[c];
    }
    Elem add(Elem a, Elem b) const { return F.add(a, b); }
    Elem sub(Elem a, Elem b) const { return F.sub(a, b); }
    Elem mul(Elem a, Elem b) const { return F.mul(a, b); }
    Elem div(Elem a, Elem b) const { return F.div(a, b); }
    Elem neg(Elem a) const { return F.neg(a); }
};

}  // namespace

std::map<std::string, Elem> evaluate_parameters(const ParameterEnv& env, const PrimeField& F,
                                                const std::map<std::string, Elem>& free_values) {
    std::map<std::string, Elem> vals;
    for (const auto& r : env.rules) {
        if (r.kind == ParameterRule::Kind::free) {
            auto it = free_values.find(r.name);
            if (it == free_values.end())
                throw ConfigError("no value given for free parameter '" + r.name + "'");
            vals[r.name] = it->second % F.modulus();
        } else {
            FieldOps ops{F, vals};
            vals[r.name] = evaluate<Elem>(*r.expr, ops);
        }
    }
    return vals;
}

// ---------------------------------------------------------------------------
// Expansion over corner monomials

namespace {

using Mono = std::array<std::uint8_t, 4>;
using CornerPoly = std::map<Mono, ExprPtr>;

constexpr int kMaxCornerExponent = 32;

void accumulate(CornerPoly& p, const Mono& m, ExprPtr c) {
    auto [it, inserted] = p.emplace(m, c);
    if (!inserted) it->second = Expr::binary(Expr::Kind::add, it->second, std::move(c));
}

CornerPoly poly_mul(const CornerPoly& a, const CornerPoly& b) {
    CornerPoly r;
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) {
            Mono m{};
            for (int k = 0; k < 4; ++k) {
                const int e = ma[k] + mb[k];
                if (e > kMaxCornerExponent) throw ParseError("corner exponent too large");
                m[k] = static_cast<std::uint8_t>(e);
            }
            accumulate(r, m, Expr::binary(Expr::Kind::mul, ca, cb));
        }
    }
    return r;
}

CornerPoly expand(const ExprPtr& e) {
    using K = Expr::Kind;
    switch (e->kind) {
        case K::constant:
        case K::param: return CornerPoly{{Mono{}, e}};
        case K::corner: {
            Mono m{};
            m[e->corner] = 1;
            return CornerPoly{{m, Expr::constant(1)}};
        }
        case K::add:
        case K::sub: {
            CornerPoly r = expand(e->lhs);
            for (auto& [m, c] : expand(e->rhs))
                accumulate(r, m, e->kind == K::add ? c : Expr::negate(c));
            return r;
        }
        case K::mul: return poly_mul(expand(e->lhs), expand(e->rhs));
        case K::div: {
            if (mentions_corner(*e->rhs))
                throw ParseError("non-polynomial in a corner symbol (division by corner)");
            CornerPoly r = expand(e->lhs);
            for (auto& [m, c] : r) c = Expr::binary(K::div, c, e->rhs);
            return r;
        }
        case K::neg: {
            CornerPoly r = expand(e->lhs);
            for (auto& [m, c] : r) c = Expr::negate(c);
            return r;
        }
        case K::pow: {
            CornerPoly base = expand(e->lhs);
            CornerPoly acc{{Mono{}, Expr::constant(1)}};
            for (int k = 0; k < e->exponent; ++k) acc = poly_mul(acc, base);
            return acc;
        }
    }
    throw std::logic_error("bad expression node");
}

// Random parameter environments used for symbolic zero tests.
class ZeroTester {
   public:
    explicit ZeroTester(const ParameterEnv& env) : F_(arith::kMersenne61) {
        SplitMix64 sm(0x5eed5eedULL);
        for (int k = 0; k < kPoints; ++k) {
            for (int attempt = 0;; ++attempt) {
                if (attempt > 100) throw ParseError("parameter definitions divide by zero");
                std::map<std::string, Elem> free;
                for (const auto& n : env.free_names()) free[n] = 1 + sm.next() % (F_.modulus() - 1);
                try {
                    envs_.push_back(evaluate_parameters(env, F_, free));
                    break;
                } catch (const arith::DivisionByZero&) {
                }
            }
        }
    }

    bool identically_zero(const Expr& e) const {
        for (const auto& vals : envs_) {
            FieldOps ops{F_, vals};
            try {
                if (evaluate<Elem>(e, ops) != 0) return false;
            } catch (const arith::DivisionByZero&) {
                return false;
            }
        }
        return true;
    }

   private:
    static constexpr int kPoints = 4;
    PrimeField F_;
    std::vector<std::map<std::string, Elem>> envs_;
};

// ---------------------------------------------------------------------------
// Tokenizer and recursive-descent parser

struct Token {
    enum class Kind { ident, number, symbol, end };
    Kind kind = Kind::end;
    std::string text;
    int column = 0;
};

struct NameRef {
    std::string name;
    int line;
    int column;
};

class LineParser {
   public:
    LineParser(std::string_view line, int lineno) : src_(line), line_(lineno) { advance(); }

    const Token& peek() const { return tok_; }

    ParseError error(const std::string& msg) const { return ParseError(msg, line_, tok_.column); }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    bool accept(std::string_view sym) {
        if (tok_.kind == Token::Kind::symbol && tok_.text == sym) {
            advance();
            return true;
        }
        return false;
    }

    void expect(std::string_view sym) {
        if (!accept(sym)) throw error("expected '" + std::string(sym) + "'");
    }

    std::string expect_ident() {
        if (tok_.kind != Token::Kind::ident) throw error("expected a name");
        return take().text;
    }

    void expect_end() {
        if (tok_.kind != Token::Kind::end) throw error("unexpected '" + tok_.text + "'");
    }

    ExprPtr parse_expr(bool allow_corners) {
        allow_corners_ = allow_corners;
        return expr();
    }

    const std::vector<NameRef>& refs() const { return refs_; }

   private:
    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (accept("+"))
                e = Expr::binary(Expr::Kind::add, e, term());
            else if (accept("-"))
                e = Expr::binary(Expr::Kind::sub, e, term());
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            if (accept("*")) {
                e = Expr::binary(Expr::Kind::mul, e, unary());
            } else if (tok_.kind == Token::Kind::symbol && tok_.text == "/") {
                const int col = tok_.column;
                advance();
                ExprPtr d = unary();
                if (mentions_corner(*d))
                    throw ParseError("non-polynomial in a corner symbol (division by corner)",
                                     line_, col);
                if (d->is_constant(0)) throw ParseError("division by zero constant", line_, col);
                e = Expr::binary(Expr::Kind::div, e, d);
            } else {
                return e;
            }
        }
    }

    ExprPtr unary() {
        if (accept("-")) return Expr::negate(unary());
        if (accept("+")) return unary();
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        while (tok_.kind == Token::Kind::symbol && tok_.text == "^") {
            advance();
            if (tok_.kind != Token::Kind::number || tok_.text.find('.') != std::string::npos)
                throw error("exponent must be a nonnegative integer");
            const int n = std::stoi(take().text);
            if (n > kMaxCornerExponent) throw error("exponent too large");
            base = Expr::power(base, n);
        }
        return base;
    }

    ExprPtr primary() {
        if (tok_.kind == Token::Kind::number) return number(take());
        if (tok_.kind == Token::Kind::ident) {
            const Token t = take();
            for (int c = 0; c < 4; ++c) {
                if (t.text == kCornerNames[c]) {
                    if (!allow_corners_)
                        throw ParseError("corner symbol '" + t.text +
                                             "' not allowed in a parameter definition",
                                         line_, t.column);
                    return Expr::corner_var(c);
                }
            }
            refs_.push_back({t.text, line_, t.column});
            return Expr::param(t.text);
        }
        if (accept("(")) {
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (tok_.kind == Token::Kind::end) throw error("unexpected end of expression");
        throw error("unexpected '" + tok_.text + "'");
    }

    ExprPtr number(const Token& t) {
        const auto dot = t.text.find('.');
        std::string digits = t.text;
        std::int64_t den = 1;
        if (dot != std::string::npos) {
            const std::size_t frac = t.text.size() - dot - 1;
            if (frac > 17) throw ParseError("too many decimal digits", line_, t.column);
            digits.erase(dot, 1);
            for (std::size_t k = 0; k < frac; ++k) den *= 10;
        }
        if (digits.size() > 18) throw ParseError("numeric literal too large", line_, t.column);
        return Expr::constant(Rational{std::stoll(digits), den});
    }

    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        tok_ = Token{};
        tok_.column = static_cast<int>(pos_) + 1;
        if (pos_ >= src_.size()) return;
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t s = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::Kind::ident;
            tok_.text = std::string(src_.substr(s, pos_ - s));
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t s = pos_;
            bool dot = false;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                    (src_[pos_] == '.' && !dot))) {
                if (src_[pos_] == '.') dot = true;
                ++pos_;
            }
            tok_.kind = Token::Kind::number;
            tok_.text = std::string(src_.substr(s, pos_ - s));
            if (tok_.text == ".") throw ParseError("malformed number", line_, tok_.column);
        } else if (std::string_view("+-*/^()=").find(c) != std::string_view::npos) {
            tok_.kind = Token::Kind::symbol;
            tok_.text = std::string(1, c);
            ++pos_;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line_, tok_.column);
        }
    }

    std::string_view src_;
    int line_;
    std::size_t pos_ = 0;
    Token tok_;
    bool allow_corners_ = true;
    std::vector<NameRef> refs_;
};

struct PendingLet {
    std::string name;
    ExprPtr expr;
    std::vector<NameRef> refs;
    int line;
};

bool is_corner_name(std::string_view n) {
    return std::find(kCornerNames.begin(), kCornerNames.end(), n) != kCornerNames.end();
}

// Orders derived bindings so each one follows everything it references.
std::vector<PendingLet> order_lets(std::vector<PendingLet> lets,
                                   const std::set<std::string>& free) {
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < lets.size(); ++k) index[lets[k].name] = k;

    for (const auto& l : lets) {
        for (const auto& r : l.refs) {
            if (!free.count(r.name) && !index.count(r.name))
                throw ParseError("reference to undefined parameter '" + r.name + "'", r.line,
                                 r.column);
        }
    }

    enum class Mark { none, active, done };
    std::vector<Mark> mark(lets.size(), Mark::none);
    std::vector<PendingLet> out;
    std::function<void(std::size_t)> visit = [&](std::size_t k) {
        if (mark[k] == Mark::done) return;
        if (mark[k] == Mark::active)
            throw ParseError("cyclic parameter definition involving '" + lets[k].name + "'",
                             lets[k].line, 1);
        mark[k] = Mark::active;
        for (const auto& r : lets[k].refs) {
            auto it = index.find(r.name);
            if (it != index.end()) visit(it->second);
        }
        mark[k] = Mark::done;
        out.push_back(lets[k]);
    };
    for (std::size_t k = 0; k < lets.size(); ++k) visit(k);
    return out;
}

std::string strip_comment(std::string_view line) {
    const auto h = line.find('#');
    return std::string(h == std::string_view::npos ? line : line.substr(0, h));
}

}  // namespace

QuadRelationSpec parse_equation(std::string_view text, std::string name) {
    std::vector<std::string> free_order;
    std::set<std::string> free;
    std::vector<PendingLet> lets;
    std::set<std::string> declared;
    ExprPtr relation;
    std::vector<NameRef> relation_refs;

    auto declare = [&](const std::string& n, int line, int col) {
        if (is_corner_name(n))
            throw ParseError("'" + n + "' is a corner symbol, not a parameter", line, col);
        if (!declared.insert(n).second)
            throw ParseError("parameter '" + n + "' declared twice", line, col);
    };

    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t stop = text.find('\n', start);
        if (stop == std::string_view::npos) stop = text.size();
        std::string_view raw = text.substr(start, stop - start);
        start = stop + 1;
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        const std::string body = strip_comment(raw);
        LineParser lp(body, lineno);
        if (lp.peek().kind == Token::Kind::end) continue;
        if (lp.peek().kind != Token::Kind::ident) throw lp.error("expected a directive");
        const std::string directive = lp.take().text;

        if (directive == "params") {
            if (lp.peek().kind == Token::Kind::end) throw lp.error("'params' needs names");
            while (lp.peek().kind != Token::Kind::end) {
                const int col = lp.peek().column;
                const std::string n = lp.expect_ident();
                declare(n, lineno, col);
                free.insert(n);
                free_order.push_back(n);
            }
        } else if (directive == "let") {
            const int col = lp.peek().column;
            const std::string n = lp.expect_ident();
            declare(n, lineno, col);
            lp.expect("=");
            ExprPtr e = lp.parse_expr(false);
            lp.expect_end();
            lets.push_back({n, e, lp.refs(), lineno});
        } else if (directive == "relation") {
            if (relation) throw ParseError("more than one 'relation' line", lineno, 1);
            ExprPtr lhs = lp.parse_expr(true);
            if (lp.accept("=")) {
                ExprPtr rhs = lp.parse_expr(true);
                lhs = Expr::binary(Expr::Kind::sub, lhs, rhs);
            }
            lp.expect_end();
            relation = lhs;
            relation_refs = lp.refs();
        } else {
            throw ParseError("unknown directive '" + directive + "'", lineno, 1);
        }
        if (stop == text.size()) break;
    }
    if (!relation) throw ParseError("missing 'relation' line");

    QuadRelationSpec spec;
    spec.name = std::move(name);
    for (const auto& n : free_order)
        spec.params.rules.push_back({n, ParameterRule::Kind::free, nullptr});
    for (auto& l : order_lets(std::move(lets), free))
        spec.params.rules.push_back({l.name, ParameterRule::Kind::derived, l.expr});
    for (const auto& r : relation_refs) {
        if (!spec.params.find(r.name))
            throw ParseError("reference to undefined parameter '" + r.name + "'", r.line,
                             r.column);
    }
    spec.relation = relation;

    const ZeroTester zero(spec.params);
    const CornerPoly expanded = expand(relation);
    for (auto& c : spec.coeffs) c = Expr::constant(0);
    for (const auto& [m, c] : expanded) {
        const bool is_zero = zero.identically_zero(*c);
        int mask = 0;
        for (int k = 0; k < 4; ++k) {
            if (m[k] >= 2 && !is_zero)
                throw ParseError("not multilinear: degree " + std::to_string(m[k]) + " in " +
                                 std::string(kCornerNames[k]));
            if (m[k] == 1) mask |= 1 << k;
        }
        if (is_zero) continue;
        if (std::any_of(m.begin(), m.end(), [](auto e) { return e >= 2; })) continue;
        spec.coeffs[mask] = c;
        spec.nonzero[mask] = true;
    }
    if (spec.nonzero_count() == 0) throw ParseError("relation is identically zero");
    for (int c = 0; c < 4; ++c) {
        for (int mask = 0; mask < 16; ++mask)
            if ((mask >> c & 1) && spec.nonzero[mask]) spec.solvable[c] = true;
    }
    if (std::none_of(spec.solvable.begin(), spec.solvable.end(), [](bool b) { return b; }))
        throw ParseError("relation does not involve any corner symbol");
    return spec;
}

// ---------------------------------------------------------------------------
// Builtin registry

const std::vector<BuiltinInfo>& builtin_registry() {
    static const std::vector<BuiltinInfo> reg = {
        {"dcr", "deformed cross-ratio, generic parameters",
         "params a b c d s\n"
         "relation (y00 - a*y10)*(y01 - b*y11) - s*(y00 - c*y01)*(y10 - d*y11)\n"},
        {"dcr-integrable", "deformed cross-ratio on the integrable locus a = b = c = d",
         "params a s\n"
         "let b = a\n"
         "let c = a\n"
         "let d = a\n"
         "relation (y00 - a*y10)*(y01 - b*y11) - s*(y00 - c*y01)*(y10 - d*y11)\n"},
        {"q4", "Q4 form with unconstrained parameters",
         "params A B a b d e f\n"
         "relation A*((y00 - b)*(y01 - b) - d)*((y10 - b)*(y11 - b) - d)"
         " + B*((y00 - a)*(y10 - a) - e)*((y01 - a)*(y11 - a) - e) = f\n"},
        {"q4-constrained", "Q4 form with its parameter constraints imposed",
         "params A B a b c\n"
         "let d = (a - b)*(c - b)\n"
         "let e = (b - a)*(c - a)\n"
         "let C = (A*(c - b) + B*(c - a))/(a - b)\n"
         "let f = A*B*C*(a - b)\n"
         "relation A*((y00 - b)*(y01 - b) - d)*((y10 - b)*(y11 - b) - d)"
         " + B*((y00 - a)*(y10 - a) - e)*((y01 - a)*(y11 - a) - e) = f\n"},
        {"dsg", "discrete sine-Gordon",
         "params a\n"
         "relation y00*y10*y01*y11 - a*(y00*y11 - y10*y01) - 1\n"},
        {"aniso", "anisotropic model with direction-dependent entropies",
         "relation y01*y00*y10 + y01*y11 + y10\n"},
    };
    return reg;
}

QuadRelationSpec builtin(std::string_view name) {
    for (const auto& b : builtin_registry())
        if (b.name == name) return parse_equation(b.source, b.name);
    throw ConfigError("unknown builtin equation '" + std::string(name) + "'");
}

std::string builtin_for_mode(std::string_view base, std::string_view mode) {
    bool known = false;
    for (const auto& b : builtin_registry()) known = known || b.name == base;
    if (!known) throw ConfigError("unknown builtin equation '" + std::string(base) + "'");
    std::string target(base);
    if (mode == "integrable")
        target += "-integrable";
    else if (mode == "constrained")
        target += "-constrained";
    else if (mode != "generic")
        throw ConfigError("unknown parameter mode '" + std::string(mode) + "'");
    for (const auto& b : builtin_registry())
        if (b.name == target) return target;
    throw ConfigError("equation '" + std::string(base) + "' has no " + std::string(mode) +
                      " variant");
}

// ---------------------------------------------------------------------------
// Orientation

std::string_view to_string(Orientation o) {
    switch (o) {
        case Orientation::pp: return "++";
        case Orientation::pm: return "+-";
        case Orientation::mp: return "-+";
        case Orientation::mm: return "--";
    }
    return "??";
}

std::optional<Orientation> parse_orientation(std::string_view s) {
    for (auto o : kAllOrientations)
        if (to_string(o) == s) return o;
    return std::nullopt;
}

int sign1(Orientation o) { return (o == Orientation::pp || o == Orientation::pm) ? 1 : -1; }
int sign2(Orientation o) { return (o == Orientation::pp || o == Orientation::mp) ? 1 : -1; }

Orientation orientation_from_signs(int s1, int s2) {
    if (s1 > 0) return s2 > 0 ? Orientation::pp : Orientation::pm;
    return s2 > 0 ? Orientation::mp : Orientation::mm;
}

namespace {

// A diagonal with signs (s1, s2) evolves towards (-s1, s2); reflecting n1
// maps that corner to +n1 when s1 > 0, reflecting n2 when s2 < 0.
bool reflects1(Orientation o) { return sign1(o) > 0; }
bool reflects2(Orientation o) { return sign2(o) < 0; }

Orientation from_reflections(bool r1, bool r2) {
    return orientation_from_signs(r1 ? 1 : -1, r2 ? -1 : 1);
}

int permute_mask(int mask, bool r1, bool r2) {
    int out = 0;
    for (int c = 0; c < 4; ++c) {
        if (!(mask >> c & 1)) continue;
        int t = c;
        if (r1) t ^= 1;  // swaps the n1 bit: y00<->y10, y01<->y11
        if (r2) t ^= 2;  // swaps the n2 bit: y00<->y01, y10<->y11
        out |= 1 << t;
    }
    return out;
}

}  // namespace

Orientation compose(Orientation a, Orientation b) {
    return from_reflections(reflects1(a) != reflects1(b), reflects2(a) != reflects2(b));
}

SpecializedRelation reflect(const SpecializedRelation& rel, bool n1, bool n2) {
    SpecializedRelation out = rel;
    for (int mask = 0; mask < 16; ++mask) out.coeffs[permute_mask(mask, n1, n2)] = rel.coeffs[mask];
    out.reflect1 = rel.reflect1 != n1;
    out.reflect2 = rel.reflect2 != n2;
    return out;
}

SpecializedRelation orient(const SpecializedRelation& rel, Orientation o) {
    return reflect(rel, reflects1(o), reflects2(o));
}

bool reflection_allowed(const QuadRelationSpec& spec, bool n1, bool n2) {
    int solved = y11;
    if (n1) solved ^= 1;
    if (n2) solved ^= 2;
    return spec.solvable[solved];
}

bool orientation_allowed(const QuadRelationSpec& spec, Orientation o) {
    return reflection_allowed(spec, reflects1(o), reflects2(o));
}

// ---------------------------------------------------------------------------
// Specialization

bool SpecializedRelation::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](Elem c) { return c == 0; });
}

SpecializedRelation specialize_with(const QuadRelationSpec& spec, const PrimeField& F,
                                    const std::map<std::string, Elem>& free_values) {
    SpecializedRelation rel;
    rel.param_values = evaluate_parameters(spec.params, F, free_values);
    for (int mask = 0; mask < 16; ++mask) {
        FieldOps ops{F, rel.param_values};
        rel.coeffs[mask] = spec.nonzero[mask] ? evaluate<Elem>(*spec.coeffs[mask], ops) : 0;
    }
    rel.provenance.equation = spec.name;
    rel.provenance.modulus = F.modulus();
    return rel;
}

SpecializedRelation specialize(const QuadRelationSpec& spec, const PrimeField& F,
                               std::uint64_t seed) {
    constexpr int kMaxRounds = 100;
    const auto names = spec.params.free_names();
    SplitMix64 stream(seed ^ 0x9a7a3e7e5eedULL);
    for (int round = 0; round < kMaxRounds; ++round) {
        std::map<std::string, Elem> free;
        bool ok = true;
        std::set<Elem> seen;
        for (const auto& n : names) {
            const Elem v = uniform_elem(stream, F.modulus());
            if (v == 0 || !seen.insert(v).second) {
                ok = false;
                break;
            }
            free[n] = v;
        }
        if (!ok) continue;
        try {
            SpecializedRelation rel = specialize_with(spec, F, free);
            if (rel.is_zero()) continue;
            rel.provenance.seed = seed;
            return rel;
        } catch (const arith::DivisionByZero&) {
        }
    }
    throw ConfigError("degenerate parameter spec '" + spec.name + "': no admissible values after " +
                      std::to_string(kMaxRounds) + " rounds");
}

// ---------------------------------------------------------------------------
// Corner solve

ReducedFraction solve_corner(const PrimeField& F, const SpecializedRelation& rel,
                             const ReducedFraction& v00, const ReducedFraction& v10,
                             const ReducedFraction& v01) {
    using arith::FieldPoly;
    // With y = n/d and D = d00 d10 d01, f = P y11 + Q becomes
    //   P D = sum_T c[T|8] m_T,   Q D = sum_T c[T] m_T,
    //   m_T = prod_{v in T} n_v prod_{v not in T} d_v.
    const std::array<const ReducedFraction*, 3> v = {&v00, &v10, &v01};
    std::array<FieldPoly, 4> pair;
    for (int t = 0; t < 4; ++t) {
        const FieldPoly& a = (t & 1) ? v[0]->numerator() : v[0]->denominator();
        const FieldPoly& b = (t & 2) ? v[1]->numerator() : v[1]->denominator();
        pair[t] = arith::poly_mul(F, a, b);
    }
    std::size_t len = 0;
    std::array<FieldPoly, 8> m;
    for (int t = 0; t < 8; ++t) {
        const FieldPoly& c = (t & 4) ? v[2]->numerator() : v[2]->denominator();
        m[t] = arith::poly_mul(F, pair[t & 3], c);
        len = std::max(len, m[t].coeffs.size());
    }
    std::vector<Elem> P(len, 0), Q(len, 0);
    for (int t = 0; t < 8; ++t) {
        const Elem cp = rel.coeffs[t | 8];
        const Elem cq = rel.coeffs[t];
        const auto& mt = m[t].coeffs;
        for (std::size_t k = 0; k < mt.size(); ++k) {
            if (cp) P[k] = F.add(P[k], F.mul(cp, mt[k]));
            if (cq) Q[k] = F.sub(Q[k], F.mul(cq, mt[k]));
        }
    }
    FieldPoly PD(std::move(P)), QD(std::move(Q));
    if (PD.is_zero()) throw SingularCell("coefficient of the solved corner vanishes");
    return ReducedFraction::make(F, std::move(QD), std::move(PD));
}

ReducedFraction evaluate_relation(const PrimeField& F, const SpecializedRelation& rel,
                                  const std::array<ReducedFraction, 4>& corners) {
    ReducedFraction sum;
    for (int mask = 0; mask < 16; ++mask) {
        if (rel.coeffs[mask] == 0) continue;
        ReducedFraction term = ReducedFraction::constant(F, rel.coeffs[mask]);
        for (int c = 0; c < 4; ++c)
            if (mask >> c & 1) term = arith::frac_combine(F, arith::FracOp::mul, term, corners[c]);
        sum = arith::frac_combine(F, arith::FracOp::add, sum, term);
    }
    return sum;
}

}  // namespace quadent::equation
