#include "quadent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace quadent::analysis {

namespace {

void trim(std::vector<Int>& c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

Int content(const IntPoly& p) {
    Int g = 0;
    for (const auto& c : p.coeffs) g = boost::multiprecision::gcd(g, c);
    return g;
}

IntPoly monomial_times(const IntPoly& p, const Int& c, int shift) {
    std::vector<Int> out(p.coeffs.size() + shift, Int(0));
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) out[k + shift] = p.coeffs[k] * c;
    return IntPoly(std::move(out));
}

int sign_normalizer(const IntPoly& p) {
    for (const auto& c : p.coeffs)
        if (c != 0) return c < 0 ? -1 : 1;
    return 1;
}

}  // namespace

IntPoly::IntPoly(std::vector<Int> c) : coeffs(std::move(c)) { trim(coeffs); }

IntPoly IntPoly::from_ints(std::initializer_list<long long> c) {
    std::vector<Int> v;
    for (long long x : c) v.emplace_back(x);
    return IntPoly(std::move(v));
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<Int> out(std::max(a.coeffs.size(), b.coeffs.size()), Int(0));
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) out[k] += a.coeffs[k];
    for (std::size_t k = 0; k < b.coeffs.size(); ++k) out[k] += b.coeffs[k];
    return IntPoly(std::move(out));
}

IntPoly operator-(const IntPoly& a) {
    std::vector<Int> out = a.coeffs;
    for (auto& c : out) c = -c;
    return IntPoly(std::move(out));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) { return a + (-b); }

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Int> out(a.coeffs.size() + b.coeffs.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j) out[i + j] += a.coeffs[i] * b.coeffs[j];
    return IntPoly(std::move(out));
}

std::optional<IntPoly> exact_quotient(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.degree() < b.degree()) {
        if (a.is_zero()) return IntPoly{};
        return std::nullopt;
    }
    std::vector<Int> r = a.coeffs;
    std::vector<Int> q(a.coeffs.size() - b.coeffs.size() + 1, Int(0));
    const Int& lead = b.coeffs.back();
    for (int k = a.degree() - b.degree(); k >= 0; --k) {
        const Int& top = r[k + b.degree()];
        if (top == 0) continue;
        if (top % lead != 0) return std::nullopt;
        const Int f = top / lead;
        q[k] = f;
        for (std::size_t j = 0; j < b.coeffs.size(); ++j) r[k + j] -= f * b.coeffs[j];
    }
    trim(r);
    if (!r.empty()) return std::nullopt;
    return IntPoly(std::move(q));
}

IntPoly primitive_part(const IntPoly& a) {
    if (a.is_zero()) return {};
    const Int g = content(a);
    std::vector<Int> out = a.coeffs;
    const int sg = sign_normalizer(a);
    for (auto& c : out) c = c / g * sg;
    return IntPoly(std::move(out));
}

IntPoly poly_gcd(const IntPoly& a, const IntPoly& b) {
    IntPoly x = primitive_part(a), y = primitive_part(b);
    if (x.degree() < y.degree()) std::swap(x, y);
    while (!y.is_zero()) {
        IntPoly r = x;
        const Int lead = y.coeffs.back();
        while (!r.is_zero() && r.degree() >= y.degree()) {
            const Int top = r.coeffs.back();
            r = monomial_times(r, lead, 0) - monomial_times(y, top, r.degree() - y.degree());
        }
        x = std::move(y);
        y = primitive_part(r);
    }
    return x;
}

IntPoly derivative(const IntPoly& a) {
    if (a.degree() < 1) return {};
    std::vector<Int> out(a.coeffs.size() - 1);
    for (std::size_t k = 1; k < a.coeffs.size(); ++k) out[k - 1] = a.coeffs[k] * static_cast<int>(k);
    return IntPoly(std::move(out));
}

IntPoly reciprocal(const IntPoly& p) {
    std::vector<Int> out(p.coeffs.rbegin(), p.coeffs.rend());
    return IntPoly(std::move(out));
}

std::vector<Int> series(const IntPoly& num, const IntPoly& den, std::size_t n) {
    if (den.is_zero() || (den[0] != 1 && den[0] != -1))
        throw std::invalid_argument("series needs a denominator with constant term +-1");
    std::vector<Int> g(n, Int(0));
    for (std::size_t k = 0; k < n; ++k) {
        Int acc = num.coeff(k);
        for (std::size_t i = 1; i <= k && i < den.coeffs.size(); ++i) acc -= den.coeffs[i] * g[k - i];
        g[k] = acc * den.coeffs[0];
    }
    return g;
}

std::string to_string(const IntPoly& p, char var) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
        const Int& c = p.coeffs[k];
        if (c == 0) continue;
        const bool neg = c < 0;
        const Int mag = neg ? Int(-c) : c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        if (k == 0 || mag != 1) os << mag;
        if (k > 0 && mag != 1) os << '*';
        if (k >= 1) os << var;
        if (k >= 2) os << '^' << k;
    }
    return os.str();
}

IntPoly cyclotomic(int k) {
    if (k < 1) throw std::invalid_argument("cyclotomic index must be positive");
    std::vector<Int> xk(k + 1, Int(0));
    xk[0] = -1;
    xk[k] = 1;
    IntPoly p(std::move(xk));
    for (int d = 1; d < k; ++d) {
        if (k % d != 0) continue;
        p = *exact_quotient(p, cyclotomic(d));
    }
    return p;
}

namespace {

// Fraction-free elimination of the augmented system [m | rhs]; nullopt if singular.
std::optional<std::vector<Rat>> solve_exact(std::vector<std::vector<Int>> m) {
    const std::size_t n = m.size();
    Int prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && m[piv][k] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(m[k], m[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j <= n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    std::vector<Rat> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Rat acc = Rat(m[ii][n]);
        for (std::size_t j = ii + 1; j < n; ++j) acc -= Rat(m[ii][j]) * x[j];
        x[ii] = acc / Rat(m[ii][ii]);
    }
    return x;
}

bool holds_at(const std::vector<Int>& c, std::span<const std::int64_t> seq, std::size_t n) {
    Int acc = 0;
    for (std::size_t i = 1; i <= c.size(); ++i) acc += c[i - 1] * seq[n - i];
    return acc == seq[n];
}

}  // namespace

std::optional<LinearRecurrence> fit_exact(std::span<const std::int64_t> seq, int transient,
                                          int order) {
    if (order < 1 || transient < 0) return std::nullopt;
    const std::size_t t = transient, L = order;
    if (seq.size() < t + 2 * L) return std::nullopt;
    std::vector<std::vector<Int>> m(L, std::vector<Int>(L + 1));
    for (std::size_t r = 0; r < L; ++r) {
        const std::size_t n = t + L + r;
        for (std::size_t i = 1; i <= L; ++i) m[r][i - 1] = seq[n - i];
        m[r][L] = seq[n];
    }
    const auto sol = solve_exact(std::move(m));
    if (!sol) return std::nullopt;
    LinearRecurrence rec;
    rec.order = order;
    rec.transient = transient;
    for (const Rat& c : *sol) {
        if (boost::multiprecision::denominator(c) != 1) return std::nullopt;
        rec.coefficients.push_back(boost::multiprecision::numerator(c));
    }
    if (rec.coefficients.back() == 0) return std::nullopt;
    for (std::size_t n = t + 2 * L; n < seq.size(); ++n)
        if (!holds_at(rec.coefficients, seq, n)) return std::nullopt;
    rec.verified = static_cast<int>(seq.size() - (t + 2 * L));
    rec.tentative = rec.verified < 2;
    return rec;
}

std::optional<LinearRecurrence> fit_recurrence(std::span<const std::int64_t> seq, int max_order,
                                               int max_transient) {
    for (int t = 0; t <= max_transient; ++t)
        for (int L = 1; L <= max_order; ++L) {
            if (seq.size() < static_cast<std::size_t>(t + 2 * L)) break;
            if (auto r = fit_exact(seq, t, L)) return r;
        }
    return std::nullopt;
}

bool reproduces(const LinearRecurrence& rec, std::span<const std::int64_t> seq) {
    if (rec.order != static_cast<int>(rec.coefficients.size())) return false;
    for (std::size_t n = rec.transient + rec.order; n < seq.size(); ++n)
        if (!holds_at(rec.coefficients, seq, n)) return false;
    return true;
}

RationalGF generating_function(std::span<const std::int64_t> seq, const LinearRecurrence& rec) {
    if (!reproduces(rec, seq))
        throw std::invalid_argument("recurrence does not reproduce the sequence");
    std::vector<Int> den(rec.order + 1);
    den[0] = 1;
    for (int i = 1; i <= rec.order; ++i) den[i] = -rec.coefficients[i - 1];
    const std::size_t nlen = std::min<std::size_t>(seq.size(), rec.transient + rec.order);
    std::vector<Int> num(nlen, Int(0));
    for (std::size_t k = 0; k < nlen; ++k)
        for (std::size_t i = 0; i <= k && i < den.size(); ++i) num[k] += den[i] * seq[k - i];

    RationalGF gf{IntPoly(std::move(num)), IntPoly(std::move(den))};
    const IntPoly g = poly_gcd(gf.numerator, gf.denominator);
    if (g.degree() > 0) {
        gf.numerator = *exact_quotient(gf.numerator, g);
        gf.denominator = *exact_quotient(gf.denominator, g);
    }
    if (gf.denominator[0] < 0) {
        gf.numerator = -gf.numerator;
        gf.denominator = -gf.denominator;
    }
    const auto expanded = series(gf.numerator, gf.denominator, seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k)
        if (expanded[k] != seq[k])
            throw std::logic_error("generating function does not expand to the sequence");
    return gf;
}

CyclotomicSplit cyclotomic_strip(const IntPoly& den) {
    if (den.is_zero() || den[0] != 1)
        throw std::invalid_argument("denominator must have constant term +1");
    CyclotomicSplit out;
    IntPoly rest = den;
    const int deg = den.degree();
    for (int k = 1; rest.degree() > 0 && k <= 2 * deg * deg; ++k) {
        // phi(k) <= deg(rest) is necessary for any factor.
        int phi = 0;
        for (int j = 1; j <= k; ++j) phi += std::gcd(j, k) == 1;
        if (phi > rest.degree()) continue;
        const IntPoly ck = cyclotomic(k);
        int mult = 0;
        while (rest.degree() >= ck.degree()) {
            auto q = exact_quotient(rest, ck);
            if (!q) break;
            rest = std::move(*q);
            ++mult;
        }
        if (mult > 0) out.factors.push_back({k, mult});
    }
    if (rest[0] < 0) rest = -rest;
    out.remainder = std::move(rest);
    return out;
}

std::string_view to_string(Growth g) {
    switch (g) {
        case Growth::exponential: return "exponential";
        case Growth::polynomial: return "polynomial";
        case Growth::undetermined: return "undetermined";
    }
    return "undetermined";
}

std::vector<std::complex<double>> polynomial_roots(const IntPoly& p) {
    if (p.degree() < 1) return {};
    IntPoly sq = p;
    const IntPoly g = poly_gcd(p, derivative(p));
    if (g.degree() > 0) sq = *exact_quotient(primitive_part(p), g);
    const int n = sq.degree();
    std::vector<long double> c(n + 1);
    for (int k = 0; k <= n; ++k) c[k] = sq.coeffs[k].convert_to<long double>();

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = static_cast<double>(-c[i] / c[n]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration failed");

    using CL = std::complex<long double>;
    std::vector<std::complex<double>> roots;
    for (int i = 0; i < n; ++i) {
        CL z(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
        for (int it = 0; it < 8; ++it) {
            CL f = 0, df = 0;
            for (int k = n; k >= 0; --k) {
                df = df * z + f;
                f = f * z + c[k];
            }
            if (df == CL(0)) break;
            const CL step = f / df;
            z -= step;
            if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(z))) break;
        }
        roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
    return roots;
}

namespace {

// n |p(z) / p'(z)| bounds the distance from z to the nearest root.
double root_error_bound(const IntPoly& p, std::complex<double> z) {
    using CL = std::complex<long double>;
    const CL zz(z.real(), z.imag());
    CL f = 0, df = 0;
    for (int k = p.degree(); k >= 0; --k) {
        df = df * zz + f;
        f = f * zz + p.coeffs[k].convert_to<long double>();
    }
    if (df == CL(0)) return std::numeric_limits<double>::infinity();
    return static_cast<double>(p.degree() * std::abs(f / df));
}

IntPoly squarefree(const IntPoly& p) {
    const IntPoly g = poly_gcd(p, derivative(p));
    return g.degree() > 0 ? *exact_quotient(primitive_part(p), g) : p;
}

}  // namespace

EntropyReport entropy_report(const RationalGF& gf, std::span<const std::int64_t> seq) {
    EntropyReport rep;
    const CyclotomicSplit split = cyclotomic_strip(gf.denominator);
    rep.cyclotomic = split.factors;
    rep.remainder = split.remainder;
    rep.witness = reciprocal(gf.denominator);
    if (rep.witness.coeffs.back() != 1) throw std::logic_error("witness is not monic");

    if (rep.remainder.degree() == 0) {
        rep.growth = Growth::polynomial;
        rep.entropy = 0.0;
        rep.smallest_pole_modulus = 1.0;
        int mult = 0;
        for (const auto& f : split.factors) mult = std::max(mult, f.multiplicity);
        if (mult == 0) rep.warnings.push_back("sequence is eventually zero");
        rep.growth_degree = std::max(0, mult - 1);
        rep.witness_root = split.factors.empty() ? 0.0 : 1.0;
        return rep;
    }

    const IntPoly rest = squarefree(rep.remainder);
    double rho = std::numeric_limits<double>::infinity();
    std::complex<double> at;
    for (const auto& z : polynomial_roots(rest))
        if (std::abs(z) < rho) {
            rho = std::abs(z);
            at = z;
        }
    if (rho > 1.0 + 1e-9)
        throw ImplausibleFit("implausible fit: smallest pole modulus " + std::to_string(rho) +
                             " exceeds 1");
    if (root_error_bound(rest, at) >= 1e-12)
        rep.warnings.push_back("smallest pole located to worse than 1e-12");
    rep.growth = Growth::exponential;
    rep.smallest_pole_modulus = rho;
    rep.entropy = -std::log(rho);

    double top = 0.0;
    for (const auto& z : polynomial_roots(rep.witness)) top = std::max(top, std::abs(z));
    rep.witness_root = top;
    if (std::abs(top - std::exp(rep.entropy)) > 1e-10)
        rep.warnings.push_back("witness root disagrees with exp(entropy)");

    if (seq.size() >= 6) {
        const std::size_t span = std::max<std::size_t>(2, seq.size() / 3);
        const std::size_t a = seq.size() - 1 - span, b = seq.size() - 1;
        if (seq[a] > 0 && seq[b] > 0) {
            const double slope =
                (std::log(static_cast<double>(seq[b])) - std::log(static_cast<double>(seq[a]))) /
                static_cast<double>(b - a);
            if (std::abs(slope - rep.entropy) > 0.25 * rep.entropy) {
                std::ostringstream w;
                w << "tail log-slope " << slope << " differs from entropy " << rep.entropy
                  << " by more than 25%";
                rep.warnings.push_back(w.str());
            }
        }
    }
    return rep;
}

std::optional<PolynomialGrowth> polynomial_growth_check(std::span<const std::int64_t> seq) {
    const int len = static_cast<int>(seq.size());
    for (int k = 0; k + 3 <= len; ++k) {
        for (int drop = 0; drop <= 2 && k + 3 <= len - drop; ++drop) {
            std::vector<Int> diff(seq.begin() + drop, seq.end());
            std::vector<Int> leading;  // Delta^j d at the first tail index
            for (int j = 0; j <= k; ++j) {
                leading.push_back(diff[0]);
                for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
                diff.pop_back();
            }
            if (!std::all_of(diff.begin(), diff.end(), [](const Int& v) { return v == 0; }))
                continue;
            if (leading.back() == 0) continue;
            // Newton form sum_j Delta^j binom(n - drop, j), expanded in powers of n.
            std::vector<Rat> poly(k + 1, Rat(0));
            std::vector<Rat> basis{Rat(1)};
            Int fact = 1;
            for (int j = 0; j <= k; ++j) {
                if (j > 0) {
                    std::vector<Rat> next(basis.size() + 1, Rat(0));
                    const Rat shift(-(drop + j - 1));
                    for (std::size_t i = 0; i < basis.size(); ++i) {
                        next[i + 1] += basis[i];
                        next[i] += basis[i] * shift;
                    }
                    basis = std::move(next);
                    fact *= j;
                }
                for (std::size_t i = 0; i < basis.size(); ++i)
                    poly[i] += basis[i] * Rat(leading[j]) / Rat(fact);
            }
            return PolynomialGrowth{k, std::move(poly), drop};
        }
    }
    return std::nullopt;
}

}  // namespace quadent::analysis
