#pragma once

// Multilinear quad relations f(y00, y10, y01, y11) = 0 on the cells of Z^2.
//
// Corner convention: y00 = y[n1,n2], y10 = y[n1+1,n2], y01 = y[n1,n2+1],
// y11 = y[n1+1,n2+1]. A subset of corners is a 4-bit mask with bit k set
// for corner k (y00 = bit 0, y10 = bit 1, y01 = bit 2, y11 = bit 3), so the
// coefficient table of a multilinear relation has 16 entries.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quadent/arith.hpp"

namespace quadent::equation {

enum Corner : int { y00 = 0, y10 = 1, y01 = 2, y11 = 3 };

inline constexpr std::array<std::string_view, 4> kCornerNames = {"y00", "y10", "y01", "y11"};

/// Syntax or validation failure while reading an equation. line/column are
/// 1-based; 0 means "not tied to a position".
class ParseError : public std::runtime_error {
   public:
    ParseError(const std::string& msg, int line = 0, int column = 0);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

   private:
    int line_;
    int column_;
};

/// Bad request against a valid equation (unknown builtin, unusable orientation).
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// The coefficient of the solved corner vanished for the current values.
class SingularCell : public std::runtime_error {
   public:
    explicit SingularCell(const std::string& msg, int i = -1, int j = -1)
        : std::runtime_error(msg), i(i), j(j) {}
    int i;
    int j;
};

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool operator==(const Rational&) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { constant, param, corner, add, sub, mul, div, neg, pow };

    Kind kind = Kind::constant;
    Rational value{};
    std::string name;  // param
    int corner = -1;
    int exponent = 0;  // pow
    ExprPtr lhs, rhs;  // rhs unused for neg/pow

    static ExprPtr constant(Rational v);
    static ExprPtr constant(std::int64_t v) { return constant(Rational{v, 1}); }
    static ExprPtr param(std::string name);
    static ExprPtr corner_var(int c);
    static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b);
    static ExprPtr negate(ExprPtr a);
    static ExprPtr power(ExprPtr a, int e);

    bool is_constant(std::int64_t v) const noexcept {
        return kind == Kind::constant && value.num == v * value.den;
    }
};

bool mentions_corner(const Expr& e);
std::string to_string(const Expr& e);

/// Generic evaluation. Ops supplies: constant(Rational), param(name),
/// corner(int), add, sub, mul, div, neg.
template <class V, class Ops>
V evaluate(const Expr& e, Ops& ops) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::constant: return ops.constant(e.value);
        case K::param: return ops.param(e.name);
        case K::corner: return ops.corner(e.corner);
        case K::add: return ops.add(evaluate<V>(*e.lhs, ops), evaluate<V>(*e.rhs, ops));
        case K::sub: return ops.sub(evaluate<V>(*e.lhs, ops), evaluate<V>(*e.rhs, ops));
        case K::mul: return ops.mul(evaluate<V>(*e.lhs, ops), evaluate<V>(*e.rhs, ops));
        case K::div: return ops.div(evaluate<V>(*e.lhs, ops), evaluate<V>(*e.rhs, ops));
        case K::neg: return ops.neg(evaluate<V>(*e.lhs, ops));
        case K::pow: {
            V base = evaluate<V>(*e.lhs, ops);
            V acc = ops.constant(Rational{1, 1});
            for (int k = e.exponent; k > 0; k >>= 1) {
                if (k & 1) acc = ops.mul(acc, base);
                if (k > 1) base = ops.mul(base, base);
            }
            return acc;
        }
    }
    throw std::logic_error("bad expression node");
}

struct ParameterRule {
    enum class Kind { free, derived };
    std::string name;
    Kind kind = Kind::free;
    ExprPtr expr;  // derived only; references earlier names
};

/// Bindings in dependency order: a derived rule only references names that
/// precede it.
struct ParameterEnv {
    std::vector<ParameterRule> rules;

    const ParameterRule* find(std::string_view name) const;
    std::vector<std::string> free_names() const;
};

using CoefficientTable = std::array<ExprPtr, 16>;

struct QuadRelationSpec {
    std::string name;
    ParameterEnv params;
    ExprPtr relation;  // as written, with the right-hand side moved over
    CoefficientTable coeffs;
    std::array<bool, 16> nonzero{};  // entry not identically zero
    std::array<bool, 4> solvable{};  // corner has a nonzero slice

    int nonzero_count() const;
};

/// Parses the line-oriented equation format:
///   # comment
///   params a b ...
///   let name = expr
///   relation expr [= rhs]
QuadRelationSpec parse_equation(std::string_view text, std::string name = "custom");

struct BuiltinInfo {
    std::string name;
    std::string summary;
    std::string source;
};

const std::vector<BuiltinInfo>& builtin_registry();
QuadRelationSpec builtin(std::string_view name);

/// Maps a parameter mode (generic | integrable | constrained) onto the
/// registry name derived from a base equation name.
std::string builtin_for_mode(std::string_view base, std::string_view mode);

/// Fundamental diagonal label Delta_{s1 s2}. The diagonal runs in direction
/// (s1, s2) and the evolution goes towards the corner (-s1, s2).
enum class Orientation { pp, pm, mp, mm };

inline constexpr std::array<Orientation, 4> kAllOrientations = {
    Orientation::pp, Orientation::pm, Orientation::mp, Orientation::mm};

std::string_view to_string(Orientation o);
std::optional<Orientation> parse_orientation(std::string_view s);
int sign1(Orientation o);
int sign2(Orientation o);
Orientation orientation_from_signs(int s1, int s2);
/// Group law transported from the reflection bits (Klein four-group).
Orientation compose(Orientation a, Orientation b);

struct Provenance {
    std::string equation;
    std::string params_mode = "generic";
    std::uint64_t seed = 0;
    std::uint64_t modulus = 0;
};

struct SpecializedRelation {
    std::array<arith::Elem, 16> coeffs{};
    std::map<std::string, arith::Elem> param_values;
    Provenance provenance;
    // Corner labels of the specialized table relative to the source relation,
    // as reflections of n1 and n2.
    bool reflect1 = false;
    bool reflect2 = false;

    bool is_zero() const;
    bool operator==(const SpecializedRelation& o) const {
        return coeffs == o.coeffs && reflect1 == o.reflect1 && reflect2 == o.reflect2;
    }
};

/// Draws free parameters nonzero and pairwise distinct from a deterministic
/// stream keyed by seed, then evaluates derived parameters and coefficients.
SpecializedRelation specialize(const QuadRelationSpec& spec, const arith::PrimeField& F,
                               std::uint64_t seed);

/// Same, with the free parameters given explicitly.
SpecializedRelation specialize_with(const QuadRelationSpec& spec, const arith::PrimeField& F,
                                    const std::map<std::string, arith::Elem>& free_values);

/// Values of every parameter (free and derived) for the given free values.
/// Throws DivisionByZero when a derived rule divides by zero.
std::map<std::string, arith::Elem> evaluate_parameters(
    const ParameterEnv& env, const arith::PrimeField& F,
    const std::map<std::string, arith::Elem>& free_values);

/// Relabels corners so that solving for y11 performs the evolution of the
/// given diagonal.
SpecializedRelation orient(const SpecializedRelation& rel, Orientation o);

/// Relabels corners by reflecting n1 and/or n2.
SpecializedRelation reflect(const SpecializedRelation& rel, bool n1, bool n2);

/// Whether solving y11 of orient(rel, o) is possible for generic values.
bool orientation_allowed(const QuadRelationSpec& spec, Orientation o);
bool reflection_allowed(const QuadRelationSpec& spec, bool n1, bool n2);

/// y11 from the other three corners. Throws SingularCell when the y11
/// coefficient vanishes.
arith::ReducedFraction solve_corner(const arith::PrimeField& F, const SpecializedRelation& rel,
                                    const arith::ReducedFraction& v00,
                                    const arith::ReducedFraction& v10,
                                    const arith::ReducedFraction& v01);

/// f(v00, v10, v01, v11) through generic fraction arithmetic.
arith::ReducedFraction evaluate_relation(const arith::PrimeField& F,
                                         const SpecializedRelation& rel,
                                         const std::array<arith::ReducedFraction, 4>& corners);

}  // namespace quadent::equation
