#pragma once

// Recurrence fitting, rational generating functions and entropy of integer
// degree sequences. Everything here is exact except the final root
// location.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace quadent::analysis {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Dense integer polynomial, coefficient k of s^k. Zero is the empty vector.
struct IntPoly {
    std::vector<Int> coeffs;

    IntPoly() = default;
    explicit IntPoly(std::vector<Int> c);
    static IntPoly from_ints(std::initializer_list<long long> c);

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const noexcept { return coeffs.empty(); }
    const Int& operator[](std::size_t k) const { return coeffs[k]; }
    Int coeff(std::size_t k) const { return k < coeffs.size() ? coeffs[k] : Int(0); }
    bool operator==(const IntPoly&) const = default;
};

IntPoly operator+(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a, const IntPoly& b);
IntPoly operator*(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a);

/// Quotient when b divides a over the integers, nothing otherwise.
std::optional<IntPoly> exact_quotient(const IntPoly& a, const IntPoly& b);

/// Content-free gcd over Q, sign fixed so the constant term (or, failing
/// that, the lowest nonzero coefficient) is positive.
IntPoly poly_gcd(const IntPoly& a, const IntPoly& b);
IntPoly primitive_part(const IntPoly& a);
IntPoly derivative(const IntPoly& a);

/// s^deg p(1/s).
IntPoly reciprocal(const IntPoly& p);

/// First n coefficients of the power series num/den; den(0) must be +-1.
std::vector<Int> series(const IntPoly& num, const IntPoly& den, std::size_t n);

std::string to_string(const IntPoly& p, char var = 's');

/// Phi_k with variable s.
IntPoly cyclotomic(int k);

/// d_n = sum_i c_i d_(n-i) for every n >= transient + order.
struct LinearRecurrence {
    int order = 0;
    std::vector<Int> coefficients;
    int transient = 0;
    /// Known entries past the solved window that the recurrence reproduces.
    int verified = 0;
    /// Fewer than two verified entries.
    bool tentative = false;
};

/// Solves the Hankel window for a fixed (t, L) and checks the remaining
/// entries. Rejects singular windows, non-integer solutions and c_L = 0.
std::optional<LinearRecurrence> fit_exact(std::span<const std::int64_t> seq, int transient,
                                          int order);

/// First fit in lexicographic (t, L) order.
std::optional<LinearRecurrence> fit_recurrence(std::span<const std::int64_t> seq, int max_order,
                                               int max_transient);

bool reproduces(const LinearRecurrence& rec, std::span<const std::int64_t> seq);

struct RationalGF {
    IntPoly numerator;
    IntPoly denominator;  // constant term +1
};

/// Throws std::invalid_argument when rec does not fit seq.
RationalGF generating_function(std::span<const std::int64_t> seq, const LinearRecurrence& rec);

struct CyclotomicFactor {
    int index = 0;
    int multiplicity = 0;
    bool operator==(const CyclotomicFactor&) const = default;
};

struct CyclotomicSplit {
    std::vector<CyclotomicFactor> factors;  // by increasing index
    IntPoly remainder;                      // constant term +1
};

CyclotomicSplit cyclotomic_strip(const IntPoly& den);

enum class Growth { exponential, polynomial, undetermined };
std::string_view to_string(Growth g);

struct EntropyReport {
    double entropy = 0.0;
    Growth growth = Growth::undetermined;
    int growth_degree = -1;
    /// 1 for polynomial growth.
    double smallest_pole_modulus = 1.0;
    /// Reciprocal of the full denominator.
    IntPoly witness;
    /// Largest root modulus of the witness, located independently.
    double witness_root = 1.0;
    std::vector<CyclotomicFactor> cyclotomic;
    IntPoly remainder;
    std::vector<std::string> warnings;
};

class ImplausibleFit : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// When seq is given, the log-slope over its last third is compared with
/// the entropy and a warning is recorded on a relative mismatch above 25%.
EntropyReport entropy_report(const RationalGF& gf, std::span<const std::int64_t> seq = {});

/// Roots of an integer polynomial: companion-matrix eigenvalues polished by
/// Newton steps. The polynomial is reduced to its squarefree part first.
std::vector<std::complex<double>> polynomial_roots(const IntPoly& p);

struct PolynomialGrowth {
    int degree = 0;
    /// d_n = sum_k coefficients[k] n^k for n >= first_index.
    std::vector<Rat> coefficients;
    int first_index = 0;
};

std::optional<PolynomialGrowth> polynomial_growth_check(std::span<const std::int64_t> seq);

}  // namespace quadent::analysis
