#include "quadent/arith.hpp"

#include <algorithm>
#include <utility>

namespace quadent::arith {

namespace {

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

void trim(std::vector<Elem>& c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

// out[0 .. na+nb-1) += a * b, schoolbook.
void mul_acc_school(const PrimeField& F, const Elem* a, std::size_t na, const Elem* b,
                    std::size_t nb, Elem* out) {
    for (std::size_t i = 0; i < na; ++i) {
        const Elem ai = a[i];
        if (ai == 0) continue;
        for (std::size_t j = 0; j < nb; ++j) out[i + j] = F.add(out[i + j], F.mul(ai, b[j]));
    }
}

// out[0 .. 2n-1) = a * b for two length-n operands.
void karatsuba(const PrimeField& F, const Elem* a, const Elem* b, std::size_t n, Elem* out) {
    if (n <= kKaratsubaThreshold) {
        std::fill(out, out + 2 * n - 1, 0);
        mul_acc_school(F, a, n, b, n, out);
        return;
    }
    const std::size_t lo = n / 2;
    const std::size_t hi = n - lo;

    std::vector<Elem> z0(2 * lo - 1), z2(2 * hi - 1), z1(2 * hi - 1);
    karatsuba(F, a, b, lo, z0.data());
    karatsuba(F, a + lo, b + lo, hi, z2.data());

    std::vector<Elem> sa(hi), sb(hi);
    for (std::size_t i = 0; i < hi; ++i) {
        sa[i] = a[lo + i];
        sb[i] = b[lo + i];
        if (i < lo) {
            sa[i] = F.add(sa[i], a[i]);
            sb[i] = F.add(sb[i], b[i]);
        }
    }
    karatsuba(F, sa.data(), sb.data(), hi, z1.data());
    for (std::size_t i = 0; i < z0.size(); ++i) z1[i] = F.sub(z1[i], z0[i]);
    for (std::size_t i = 0; i < z2.size(); ++i) z1[i] = F.sub(z1[i], z2[i]);

    std::fill(out, out + 2 * n - 1, 0);
    for (std::size_t i = 0; i < z0.size(); ++i) out[i] = z0[i];
    for (std::size_t i = 0; i < z2.size(); ++i) out[2 * lo + i] = F.add(out[2 * lo + i], z2[i]);
    for (std::size_t i = 0; i < z1.size(); ++i) out[lo + i] = F.add(out[lo + i], z1[i]);
}

// In-place a <- a mod b for monic b.
void rem_monic_inplace(const PrimeField& F, std::vector<Elem>& a, const std::vector<Elem>& b) {
    const std::size_t nb = b.size();
    while (a.size() >= nb) {
        const Elem c = a.back();
        if (c != 0) {
            const std::size_t shift = a.size() - nb;
            for (std::size_t j = 0; j + 1 < nb; ++j)
                a[shift + j] = F.sub(a[shift + j], F.mul(c, b[j]));
        }
        a.pop_back();
        trim(a);
    }
}

void make_monic_inplace(const PrimeField& F, std::vector<Elem>& a) {
    if (a.empty() || a.back() == 1) return;
    const Elem li = F.inv(a.back());
    for (auto& c : a) c = F.mul(c, li);
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t sp : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull,
                             31ull, 37ull}) {
        if (n % sp == 0) return n == sp;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull,
                            31ull, 37ull}) {
        std::uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus), mersenne_(modulus == kMersenne61) {
    if (modulus >= (std::uint64_t{1} << 62))
        throw std::invalid_argument("modulus must be below 2^62");
    if (!is_prime(modulus))
        throw std::invalid_argument("modulus " + std::to_string(modulus) + " is not prime");
}

Elem PrimeField::inv(Elem a) const {
    if (a == 0) throw DivisionByZero("inverse of zero in prime field");
    // Extended Euclid on signed 128-bit to dodge overflow.
    __int128 t = 0, nt = 1;
    __int128 r = p_, nr = a;
    while (nr != 0) {
        __int128 q = r / nr;
        __int128 tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (t < 0) t += p_;
    return static_cast<Elem>(t);
}

Elem PrimeField::pow(Elem a, std::uint64_t e) const noexcept {
    Elem r = 1 % p_;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Elem PrimeField::from_int(std::int64_t v) const noexcept {
    const auto p = static_cast<std::int64_t>(p_);
    std::int64_t m = v % p;
    if (m < 0) m += p;
    return static_cast<Elem>(m);
}

Elem PrimeField::from_ratio(std::int64_t num, std::int64_t den) const {
    const Elem d = from_int(den);
    if (d == 0) throw DivisionByZero("rational constant has denominator divisible by modulus");
    return div(from_int(num), d);
}

std::int64_t PrimeField::to_signed(Elem a) const noexcept {
    return a > p_ / 2 ? -static_cast<std::int64_t>(p_ - a) : static_cast<std::int64_t>(a);
}

FieldPoly::FieldPoly(std::vector<Elem> c) : coeffs(std::move(c)) { normalize(); }

FieldPoly FieldPoly::constant(Elem c) { return FieldPoly(std::vector<Elem>{c}); }

FieldPoly FieldPoly::linear(Elem c0, Elem c1) { return FieldPoly(std::vector<Elem>{c0, c1}); }

void FieldPoly::normalize() noexcept { trim(coeffs); }

FieldPoly poly_add(const PrimeField& F, const FieldPoly& a, const FieldPoly& b) {
    const auto& big = a.coeffs.size() >= b.coeffs.size() ? a.coeffs : b.coeffs;
    const auto& small = a.coeffs.size() >= b.coeffs.size() ? b.coeffs : a.coeffs;
    std::vector<Elem> r(big);
    for (std::size_t i = 0; i < small.size(); ++i) r[i] = F.add(r[i], small[i]);
    return FieldPoly(std::move(r));
}

FieldPoly poly_sub(const PrimeField& F, const FieldPoly& a, const FieldPoly& b) {
    std::vector<Elem> r(std::max(a.coeffs.size(), b.coeffs.size()), 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) r[i] = a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) r[i] = F.sub(r[i], b.coeffs[i]);
    return FieldPoly(std::move(r));
}

FieldPoly poly_neg(const PrimeField& F, const FieldPoly& a) {
    std::vector<Elem> r(a.coeffs.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.neg(a.coeffs[i]);
    return FieldPoly(std::move(r));
}

FieldPoly poly_scale(const PrimeField& F, const FieldPoly& a, Elem c) {
    if (c == 0) return {};
    std::vector<Elem> r(a.coeffs.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.mul(a.coeffs[i], c);
    return FieldPoly(std::move(r));
}

FieldPoly poly_mul_schoolbook(const PrimeField& F, const FieldPoly& a, const FieldPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Elem> r(a.coeffs.size() + b.coeffs.size() - 1, 0);
    mul_acc_school(F, a.coeffs.data(), a.coeffs.size(), b.coeffs.data(), b.coeffs.size(),
                   r.data());
    return FieldPoly(std::move(r));
}

FieldPoly poly_mul(const PrimeField& F, const FieldPoly& a, const FieldPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const std::size_t na = a.coeffs.size(), nb = b.coeffs.size();
    if (std::min(na, nb) <= kKaratsubaThreshold) return poly_mul_schoolbook(F, a, b);

    // Chop the longer operand into blocks of the shorter one's length.
    const auto& big = na >= nb ? a.coeffs : b.coeffs;
    const auto& small = na >= nb ? b.coeffs : a.coeffs;
    const std::size_t n = small.size();
    std::vector<Elem> r(na + nb - 1, 0);
    std::vector<Elem> block(n), prod(2 * n - 1);
    for (std::size_t off = 0; off < big.size(); off += n) {
        const std::size_t len = std::min(n, big.size() - off);
        std::fill(block.begin(), block.end(), 0);
        std::copy(big.begin() + off, big.begin() + off + len, block.begin());
        karatsuba(F, block.data(), small.data(), n, prod.data());
        const std::size_t used = std::min(prod.size(), r.size() - off);
        for (std::size_t i = 0; i < used; ++i) r[off + i] = F.add(r[off + i], prod[i]);
    }
    return FieldPoly(std::move(r));
}

void poly_divrem(const PrimeField& F, const FieldPoly& a, const FieldPoly& b, FieldPoly& q,
                 FieldPoly& r) {
    if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
    std::vector<Elem> rem = a.coeffs;
    if (rem.size() < b.coeffs.size()) {
        q = {};
        r = FieldPoly(std::move(rem));
        return;
    }
    const Elem li = F.inv(b.lead());
    const std::size_t nb = b.coeffs.size();
    std::vector<Elem> quo(rem.size() - nb + 1, 0);
    for (std::size_t k = quo.size(); k-- > 0;) {
        const Elem c = F.mul(rem[k + nb - 1], li);
        quo[k] = c;
        if (c == 0) continue;
        for (std::size_t j = 0; j < nb; ++j) rem[k + j] = F.sub(rem[k + j], F.mul(c, b.coeffs[j]));
    }
    rem.resize(nb - 1);
    q = FieldPoly(std::move(quo));
    r = FieldPoly(std::move(rem));
}

FieldPoly poly_div_exact(const PrimeField& F, const FieldPoly& a, const FieldPoly& b) {
    FieldPoly q, r;
    poly_divrem(F, a, b, q, r);
    return q;
}

FieldPoly poly_monic(const PrimeField& F, const FieldPoly& a) {
    FieldPoly r = a;
    make_monic_inplace(F, r.coeffs);
    return r;
}

FieldPoly poly_gcd(const PrimeField& F, FieldPoly a, FieldPoly b) {
    std::vector<Elem> x = std::move(a.coeffs), y = std::move(b.coeffs);
    trim(x);
    trim(y);
    if (x.size() < y.size()) std::swap(x, y);
    while (!y.empty()) {
        make_monic_inplace(F, y);
        rem_monic_inplace(F, x, y);
        std::swap(x, y);
    }
    make_monic_inplace(F, x);
    return FieldPoly(std::move(x));
}

Elem poly_eval(const PrimeField& F, const FieldPoly& a, Elem x) {
    Elem r = 0;
    for (std::size_t i = a.coeffs.size(); i-- > 0;) r = F.add(F.mul(r, x), a.coeffs[i]);
    return r;
}

ReducedFraction ReducedFraction::make(const PrimeField& F, FieldPoly num, FieldPoly den) {
    if (den.is_zero()) throw DivisionByZero("fraction with zero denominator");
    ReducedFraction f;
    if (num.is_zero()) return f;
    FieldPoly g = poly_gcd(F, num, den);
    if (g.degree() > 0) {
        num = poly_div_exact(F, num, g);
        den = poly_div_exact(F, den, g);
    }
    const Elem li = F.inv(den.lead());
    f.num_ = poly_scale(F, num, li);
    f.den_ = poly_scale(F, den, li);
    return f;
}

ReducedFraction ReducedFraction::from_reduced(FieldPoly num, FieldPoly den) {
    ReducedFraction f;
    f.num_ = std::move(num);
    f.den_ = std::move(den);
    return f;
}

ReducedFraction ReducedFraction::constant(const PrimeField& F, Elem c) {
    return make(F, FieldPoly::constant(c), FieldPoly::constant(1));
}

ReducedFraction frac_neg(const PrimeField& F, const ReducedFraction& a) {
    return ReducedFraction::from_reduced(poly_neg(F, a.numerator()), a.denominator());
}

ReducedFraction frac_combine(const PrimeField& F, FracOp op, const ReducedFraction& a,
                             const ReducedFraction& b) {
    const auto& an = a.numerator();
    const auto& ad = a.denominator();
    const auto& bn = b.numerator();
    const auto& bd = b.denominator();
    switch (op) {
        case FracOp::add:
        case FracOp::sub: {
            FieldPoly l = poly_mul(F, an, bd);
            FieldPoly r = poly_mul(F, bn, ad);
            FieldPoly n = op == FracOp::add ? poly_add(F, l, r) : poly_sub(F, l, r);
            return ReducedFraction::make(F, std::move(n), poly_mul(F, ad, bd));
        }
        case FracOp::mul:
            return ReducedFraction::make(F, poly_mul(F, an, bn), poly_mul(F, ad, bd));
        case FracOp::div:
            if (b.is_zero()) throw DivisionByZero("division by the zero fraction");
            return ReducedFraction::make(F, poly_mul(F, an, bd), poly_mul(F, ad, bn));
    }
    throw std::logic_error("unknown fraction op");
}

int fraction_degree(const ReducedFraction& f) noexcept {
    if (f.is_zero()) return 0;
    return std::max(f.numerator().degree(), f.denominator().degree());
}

bool is_reduced(const PrimeField& F, const ReducedFraction& f) {
    if (!f.denominator().is_monic()) return false;
    if (f.is_zero()) return f.denominator().degree() == 0;
    return poly_gcd(F, f.numerator(), f.denominator()).degree() == 0;
}

}  // namespace quadent::arith
