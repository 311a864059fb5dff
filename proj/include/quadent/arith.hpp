#pragma once

// Exact arithmetic over a word-sized prime field: dense univariate
// polynomials in the seed indeterminate x and gcd-reduced fractions.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadent::arith {

using Elem = std::uint64_t;

inline constexpr Elem kMersenne61 = (Elem{1} << 61) - 1;

class DivisionByZero : public std::domain_error {
   public:
    explicit DivisionByZero(const std::string& what) : std::domain_error(what) {}
};

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Z/pZ for a prime p < 2^62. Elements are plain integers in [0, p).
class PrimeField {
   public:
    explicit PrimeField(std::uint64_t modulus = kMersenne61);

    std::uint64_t modulus() const noexcept { return p_; }

    Elem add(Elem a, Elem b) const noexcept {
        Elem s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Elem sub(Elem a, Elem b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    Elem neg(Elem a) const noexcept { return a == 0 ? 0 : p_ - a; }
    Elem mul(Elem a, Elem b) const noexcept {
        unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
        if (mersenne_) {
            Elem lo = static_cast<Elem>(t) & kMersenne61;
            Elem hi = static_cast<Elem>(t >> 61);
            Elem s = lo + hi;
            s = (s & kMersenne61) + (s >> 61);
            return s >= p_ ? s - p_ : s;
        }
        return static_cast<Elem>(t % p_);
    }
    /// Throws DivisionByZero for a == 0.
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, std::uint64_t e) const noexcept;

    Elem from_int(std::int64_t v) const noexcept;
    /// num/den reduced into the field; throws DivisionByZero when p | den.
    Elem from_ratio(std::int64_t num, std::int64_t den) const;
    /// Signed representative in (-p/2, p/2].
    std::int64_t to_signed(Elem a) const noexcept;

    bool operator==(const PrimeField& o) const noexcept { return p_ == o.p_; }

   private:
    std::uint64_t p_;
    bool mersenne_;
};

/// Dense polynomial, lowest degree first. Normalized: no trailing zeros.
struct FieldPoly {
    std::vector<Elem> coeffs;

    static constexpr int kZeroDegree = -1;

    FieldPoly() = default;
    explicit FieldPoly(std::vector<Elem> c);
    static FieldPoly constant(Elem c);
    /// c0 + c1 x
    static FieldPoly linear(Elem c0, Elem c1);

    bool is_zero() const noexcept { return coeffs.empty(); }
    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    Elem lead() const noexcept { return coeffs.empty() ? 0 : coeffs.back(); }
    bool is_monic() const noexcept { return !coeffs.empty() && coeffs.back() == 1; }
    void normalize() noexcept;

    bool operator==(const FieldPoly&) const = default;
};

// Schoolbook below this size (in coefficients of the shorter operand),
// Karatsuba above.
inline constexpr std::size_t kKaratsubaThreshold = 64;

FieldPoly poly_add(const PrimeField& F, const FieldPoly& a, const FieldPoly& b);
FieldPoly poly_sub(const PrimeField& F, const FieldPoly& a, const FieldPoly& b);
FieldPoly poly_neg(const PrimeField& F, const FieldPoly& a);
FieldPoly poly_scale(const PrimeField& F, const FieldPoly& a, Elem c);
FieldPoly poly_mul(const PrimeField& F, const FieldPoly& a, const FieldPoly& b);
FieldPoly poly_mul_schoolbook(const PrimeField& F, const FieldPoly& a, const FieldPoly& b);
/// q, r with a = q b + r, deg r < deg b. Throws DivisionByZero for b = 0.
void poly_divrem(const PrimeField& F, const FieldPoly& a, const FieldPoly& b, FieldPoly& q,
                 FieldPoly& r);
/// Exact quotient; the caller guarantees b | a.
FieldPoly poly_div_exact(const PrimeField& F, const FieldPoly& a, const FieldPoly& b);
FieldPoly poly_monic(const PrimeField& F, const FieldPoly& a);
/// Monic gcd; gcd(0, 0) = 0.
FieldPoly poly_gcd(const PrimeField& F, FieldPoly a, FieldPoly b);
Elem poly_eval(const PrimeField& F, const FieldPoly& a, Elem x);

/// num/den with den monic and gcd(num, den) = 1. Zero is 0/1.
class ReducedFraction {
   public:
    ReducedFraction() : num_(), den_(FieldPoly::constant(1)) {}

    /// Reduces num/den. Throws DivisionByZero when den = 0.
    static ReducedFraction make(const PrimeField& F, FieldPoly num, FieldPoly den);
    /// Trusts the caller that den is monic and coprime to num.
    static ReducedFraction from_reduced(FieldPoly num, FieldPoly den);
    static ReducedFraction constant(const PrimeField& F, Elem c);

    const FieldPoly& numerator() const noexcept { return num_; }
    const FieldPoly& denominator() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_.is_zero(); }

    bool operator==(const ReducedFraction&) const = default;

   private:
    FieldPoly num_;
    FieldPoly den_;
};

enum class FracOp { add, sub, mul, div };

/// Field-of-fractions arithmetic. div by a zero fraction throws DivisionByZero.
ReducedFraction frac_combine(const PrimeField& F, FracOp op, const ReducedFraction& a,
                             const ReducedFraction& b);
ReducedFraction frac_neg(const PrimeField& F, const ReducedFraction& a);

/// max(deg num, deg den); 0 for the zero fraction.
int fraction_degree(const ReducedFraction& f) noexcept;

/// Checks the reduced-fraction invariants (monic denominator, coprime parts).
bool is_reduced(const PrimeField& F, const ReducedFraction& f);

}  // namespace quadent::arith
