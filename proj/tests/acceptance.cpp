// One line per acceptance criterion; nonzero exit when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "oracle/rational_mirror.hpp"
#include "quadent/report.hpp"
#include "quadent/rng.hpp"

using namespace quadent;
using analysis::IntPoly;
using equation::Orientation;
using Seq = std::vector<std::int64_t>;

namespace {

const arith::PrimeField F;

IntPoly P(std::initializer_list<long long> c) { return IntPoly::from_ints(c); }
IntPoly phi1_cubed() { return P({1, -1}) * P({1, -1}) * P({1, -1}); }

std::string show(const Seq& s) {
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
    os << "}";
    return os.str();
}

std::string show_gf(const report::SequenceReport& r) {
    if (!r.gf) return "no fit";
    return "(" + analysis::to_string(r.gf->numerator) + ")/(" +
           analysis::to_string(r.gf->denominator) + ")";
}

Seq prefix(const Seq& s, std::size_t n) { return Seq(s.begin(), s.begin() + std::min(n, s.size())); }

struct Check {
    bool ok = true;
    std::ostringstream why;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) why << "; ";
            why << what;
            ok = false;
        }
    }
};

// Every regression run below goes through here so that criterion 9 sees
// each solved cell back-substituted.
std::size_t g_verified = 0;
std::size_t g_expected = 0;
std::vector<std::string> g_backsub_errors;

lattice::RunOptions regression_options() {
    lattice::RunOptions o;
    o.trials = 3;
    o.evolve.verify = lattice::EvolveOptions::Verify::all;
    o.evolve.retain_values = false;
    return o;
}

std::size_t computed_cells(const lattice::StaircaseSpec& s) {
    // Populated cells off the staircase, per trial.
    const auto v = lattice::staircase_vertices(s);
    std::vector<int> top(s.width() + 1, -1);
    for (const auto& p : v) top[p.i] = std::max(top[p.i], p.j);
    std::size_t n = 0;
    for (int i = 0; i <= s.width(); ++i) n += s.height() - top[i];
    return n;
}

std::vector<Seq> run(const std::string& eq, const lattice::RunMode& mode, int steps,
                     double* ms = nullptr) {
    const auto spec = equation::builtin(eq);
    const auto start = std::chrono::steady_clock::now();
    lattice::RunResult r;
    try {
        r = lattice::degree_run(spec, mode, steps, F, regression_options());
    } catch (const lattice::BackSubstitutionFailure& e) {
        g_backsub_errors.push_back(eq + " " + mode.label() + ": " + e.what());
        return {};
    }
    if (ms)
        *ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
    g_verified += r.verified_cells;
    g_expected += 3 * computed_cells(mode.staircase_spec(steps));
    std::vector<Seq> out;
    for (const auto& s : r.sequences) out.push_back(s.values);
    return out;
}

report::SequenceReport analyze(const Seq& s) { return report::analyze_sequence(s, 8, 4); }

bool gf_is(const report::SequenceReport& r, const IntPoly& num, const IntPoly& den) {
    return r.gf && r.gf->numerator == num && r.gf->denominator == den;
}

bool zero_entropy_quadratic(const report::SequenceReport& r) {
    return r.entropy && r.entropy->growth == analysis::Growth::polynomial &&
           r.entropy->entropy == 0.0 && r.entropy->growth_degree == 2;
}

std::vector<report::SequenceReport> g_exponential;

// 1
Check dcr_generic() {
    Check c;
    const Seq want = {1, 2, 4, 9, 21, 50, 120, 289};
    double total = 0;
    for (auto o : equation::kAllOrientations) {
        double ms = 0;
        const auto seqs = run("dcr", lattice::RunMode::fundamental(o), 7, &ms);
        total += ms;
        if (seqs.empty()) {
            c.require(false, "run failed");
            continue;
        }
        const std::string tag = std::string(equation::to_string(o)) + ": ";
        c.require(seqs[0] == want, tag + "sequence " + show(seqs[0]));
        const auto r = analyze(seqs[0]);
        c.require(gf_is(r, P({1, -1, -1}), P({1, -1}) * P({1, -2, -1})), tag + "g(s) " + show_gf(r));
        c.require(r.entropy && std::abs(r.entropy->entropy - std::log(1 + std::sqrt(2.0))) < 1e-9,
                  tag + "entropy");
        if (r.entropy && r.entropy->growth == analysis::Growth::exponential) g_exponential.push_back(r);
    }
    c.require(total < 5000.0, "runtime " + std::to_string(total) + " ms");
    if (c.ok) c.why << "four orientations {1,2,4,9,21,50,120,289}, eps = log(1+sqrt 2), " << total << " ms";
    return c;
}

// 2
Check dcr_integrable() {
    Check c;
    const Seq want = {1, 2, 4, 7, 11, 16, 22, 29, 37, 46, 56};
    const auto seqs = run("dcr-integrable", lattice::RunMode::fundamental(Orientation::pp), 10);
    if (seqs.empty()) {
        c.require(false, "run failed");
        return c;
    }
    c.require(seqs[0] == want, "sequence " + show(seqs[0]));
    const auto r = analyze(seqs[0]);
    c.require(gf_is(r, P({1, -1, 1}), phi1_cubed()), "g(s) " + show_gf(r));
    using analysis::Rat;
    c.require(r.polynomial && r.polynomial->degree == 2 &&
                  r.polynomial->coefficients == std::vector<Rat>{Rat(1), Rat(1, 2), Rat(1, 2)},
              "interpolation is not 1 + n(n+1)/2");
    c.require(zero_entropy_quadratic(r), "entropy not exactly zero on the cyclotomic path");
    if (c.ok) c.why << "d = 1 + n(n+1)/2, g = (1-s+s^2)/(1-s)^3, eps = 0";
    return c;
}

// 3
Check q4_fundamental() {
    Check c;
    const Seq want = {1, 3, 7, 13, 21, 31, 43, 57, 73, 91, 111};
    double worst = 0;
    for (auto o : equation::kAllOrientations) {
        double ms = 0;
        const auto seqs = run("q4", lattice::RunMode::fundamental(o), 10, &ms);
        worst = std::max(worst, ms);
        if (seqs.empty()) {
            c.require(false, "run failed");
            continue;
        }
        const std::string tag = std::string(equation::to_string(o)) + ": ";
        c.require(seqs[0] == want, tag + "sequence " + show(seqs[0]));
        const auto r = analyze(seqs[0]);
        c.require(gf_is(r, P({1, 0, 1}), phi1_cubed()), tag + "g(s) " + show_gf(r));
        c.require(zero_entropy_quadratic(r), tag + "growth");
    }
    c.require(worst < 10000.0, "runtime " + std::to_string(worst) + " ms");
    if (c.ok) c.why << "{1,3,7,...,111}, g = (1+s^2)/(1-s)^3, quadratic, slowest run " << worst << " ms";
    return c;
}

// 4
Check q4_staircase() {
    Check c;
    const auto seqs = run("q4", lattice::RunMode::staircase(1, 2), 7);
    if (seqs.size() != 2) {
        c.require(false, "run failed");
        return c;
    }
    const Seq want1 = {1, 5, 13, 25, 41, 61, 85, 113};
    const Seq want2 = {1, 3, 5, 9, 13, 19, 25, 33, 41, 51, 61, 73, 85};
    c.require(seqs[0] == want1, "border 1 " + show(seqs[0]));
    c.require(prefix(seqs[1], 13) == want2, "border 2 " + show(seqs[1]));
    for (int nu = 0; nu < 2; ++nu) {
        const auto r = analyze(seqs[nu]);
        c.require(zero_entropy_quadratic(r), "border " + std::to_string(nu + 1) + " growth, g = " + show_gf(r));
    }
    if (c.ok) c.why << "borders match, both eps = 0 with quadratic growth";
    return c;
}

// 5
Check sine_gordon() {
    Check c;
    const Seq fund = {1, 3, 7, 13, 21, 31, 43, 57, 73, 91, 111};
    const auto f = run("dsg", lattice::RunMode::fundamental(Orientation::pp), 10);
    if (f.empty()) {
        c.require(false, "run failed");
        return c;
    }
    c.require(f[0] == fund, "fundamental " + show(f[0]));
    c.require(zero_entropy_quadratic(analyze(f[0])), "fundamental growth");

    const Seq want1 = {1, 4, 11, 21, 34, 51, 71, 94, 121, 151};
    const Seq want2 = {1, 3, 4, 8, 11, 16, 21, 28, 34, 43, 51, 61, 71};
    const auto b = run("dsg", lattice::RunMode::staircase(1, 2), 9);
    if (b.size() != 2) {
        c.require(false, "staircase run failed");
        return c;
    }
    c.require(b[0] == want1, "border 1 " + show(b[0]));
    c.require(prefix(b[1], want2.size()) == want2, "border 2 " + show(b[1]));
    const auto r1 = analyze(b[0]);
    const auto r2 = analyze(b[1]);
    c.require(gf_is(r1, P({1, 2, 4, 2, 1}), P({1, 1, 1}) * phi1_cubed()), "g[1] " + show_gf(r1));
    c.require(gf_is(r2, P({1, 2, 0, 1, 0, 1}), P({1, 1}) * P({1, 1, 1}) * phi1_cubed()),
              "g[2] " + show_gf(r2));
    c.require(r1.entropy && r1.entropy->entropy == 0.0, "eps[1]");
    c.require(r2.entropy && r2.entropy->entropy == 0.0, "eps[2]");
    if (c.ok) c.why << "fundamental and both borders match, g[1], g[2] as displayed, eps = 0";
    return c;
}

// 6
Check anisotropic() {
    Check c;
    struct Case {
        Orientation o;
        Seq want;
        IntPoly num, den;
        double eps, tol;
    };
    const double silver = std::log(1 + std::sqrt(2.0)), two = std::log(2.0);
    const std::vector<Case> cases = {
        {Orientation::mp, {1, 3, 7, 17, 41, 99, 239}, P({1, 1}), P({1, -2, -1}), silver, 1e-9},
        {Orientation::pp, {1, 2, 4, 7, 14, 28, 56}, P({1, -1}) * P({1, 1, 1}), P({1, -2}), two, 1e-12},
        {Orientation::pm, {1, 2, 5, 10, 20, 40, 80}, P({1, 0, 1}), P({1, -2}), two, 1e-12},
        {Orientation::mm, {1, 2, 4, 8, 16, 32, 64}, P({1}), P({1, -2}), two, 1e-12},
    };
    int matched = 0;
    for (const auto& k : cases) {
        const auto seqs = run("aniso", lattice::RunMode::fundamental(k.o), 6);
        if (seqs.empty()) {
            c.require(false, "run failed");
            continue;
        }
        const std::string tag = std::string(equation::to_string(k.o)) + ": ";
        const auto r = analyze(seqs[0]);
        if (r.entropy && r.entropy->growth == analysis::Growth::exponential) g_exponential.push_back(r);
        bool ok = seqs[0] == k.want && gf_is(r, k.num, k.den) && r.entropy &&
                  std::abs(r.entropy->entropy - k.eps) < k.tol;
        if (ok) {
            ++matched;
            continue;
        }
        std::ostringstream os;
        os << tag << "got " << show(seqs[0]) << " g = " << show_gf(r) << ", expected " << show(k.want);
        c.require(false, os.str());
    }
    if (c.ok) c.why << "four orientations match";
    else c.why << " (" << matched << "/4 orientations match)";
    return c;
}

// 7
Check algebraic_integer() {
    Check c;
    for (const auto& r : g_exponential) {
        const auto& w = r.entropy->witness;
        c.require(!w.is_zero() && w.coeffs.back() == 1, "witness not monic: " + analysis::to_string(w));
        c.require(std::abs(r.entropy->witness_root - std::exp(r.entropy->entropy)) < 1e-10,
                  "witness root off for " + show(r.values));
    }
    c.require(!g_exponential.empty(), "no exponential reports");
    if (c.ok) c.why << g_exponential.size() << " exponential reports, monic witnesses, roots within 1e-10";
    return c;
}

// 8
Check oracle_equivalence() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    SplitMix64 rng(1);
    auto small = [&]() -> long {
        for (;;) {
            const long v = static_cast<long>(rng.next() % 61) - 30;
            if (v != 0) return v;
        }
    };
    std::vector<lattice::StaircaseSpec> shapes;
    for (auto o : equation::kAllOrientations)
        for (int n = 1; n <= 3; ++n) shapes.push_back(lattice::StaircaseSpec::fundamental(o, n));
    for (auto [a, b] : {std::pair{1, 2}, {2, 1}, {-1, 2}, {1, -2}, {-2, -1}})
        shapes.push_back({a, b, 2});
    int compared = 0, skipped = 0;
    for (const auto& info : equation::builtin_registry()) {
        const auto spec = equation::builtin(info.name);
        for (const auto& shape : shapes) {
            if (!equation::reflection_allowed(spec, shape.reflect1(), shape.reflect2())) continue;
            oracle::MirrorInput in;
            std::set<long> used;
            for (const auto& n : spec.params.free_names()) {
                long v = small();
                while (used.count(v)) v = small();
                used.insert(v);
                in.free_params[n] = v;
            }
            std::map<std::string, arith::Elem> fv;
            for (const auto& [n, v] : in.free_params) fv[n] = F.from_int(v);
            in.alpha0 = small();
            in.beta0 = small();
            std::vector<arith::Elem> alpha, beta;
            for (int k = 0; k < shape.vertex_count(); ++k) {
                long a = small(), b = small();
                while (a * in.beta0 == in.alpha0 * b) b = small();
                in.alpha.push_back(a);
                in.beta.push_back(b);
                alpha.push_back(F.from_int(a));
                beta.push_back(F.from_int(b));
            }
            lattice::DegreePattern p;
            try {
                const auto rel = equation::specialize_with(spec, F, fv);
                p = lattice::evolve(F, rel,
                                    lattice::make_staircase(shape, F, F.from_int(in.alpha0),
                                                            F.from_int(in.beta0), alpha, beta));
            } catch (const std::domain_error&) {
                ++skipped;
                continue;
            } catch (const equation::SingularCell&) {
                ++skipped;
                continue;
            }
            const auto exact = oracle::mirror_degrees(spec, shape.lambda1, shape.lambda2, shape.steps, in);
            std::map<std::pair<int, int>, int> mine;
            for (int i = 0; i <= p.width(); ++i)
                for (int j = 0; j <= p.height(); ++j)
                    if (p.populated(i, j)) mine[lattice::to_lattice(shape, {i, j})] = p.degree(i, j);
            c.require(mine == exact, info.name + " lambda=" + std::to_string(shape.lambda1) + "," +
                                         std::to_string(shape.lambda2) + " N=" +
                                         std::to_string(shape.steps));
            ++compared;
        }
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    c.require(compared > 0, "nothing compared");
    if (c.ok) c.why << compared << " patterns equal (" << skipped << " singular draws skipped), " << ms << " ms";
    return c;
}

// 9
Check back_substitution() {
    Check c;
    for (const auto& e : g_backsub_errors) c.require(false, e);
    c.require(g_verified == g_expected, "verified " + std::to_string(g_verified) + " of " +
                                            std::to_string(g_expected) + " cells");
    if (c.ok) c.why << g_verified << " cells back-substituted to zero";
    return c;
}

// 10
Check fit_robustness() {
    Check c;
    struct Listed {
        std::string what;
        Seq seq;
        IntPoly den;
    };
    // Q4 border 2 has no reference fit; its denominator follows from
    // the period-2 quadratic pattern and is confirmed below by an exact
    // series product.
    const IntPoly q4b2 = P({1, 1}) * phi1_cubed();
    const std::vector<Listed> listed = {
        {"dcr", {1, 2, 4, 9, 21, 50, 120, 289}, P({1, -1}) * P({1, -2, -1})},
        {"dcr-integrable", {1, 2, 4, 7, 11, 16, 22, 29, 37, 46, 56}, phi1_cubed()},
        {"q4", {1, 3, 7, 13, 21, 31, 43, 57, 73, 91, 111}, phi1_cubed()},
        {"q4 [1]", {1, 5, 13, 25, 41, 61, 85, 113}, phi1_cubed()},
        {"q4 [2]", {1, 3, 5, 9, 13, 19, 25, 33, 41, 51, 61, 73, 85, 99, 113}, q4b2},
        {"dsg", {1, 3, 7, 13, 21, 31, 43, 57, 73, 91, 111}, phi1_cubed()},
        {"dsg [1]", {1, 4, 11, 21, 34, 51, 71, 94, 121, 151}, P({1, 1, 1}) * phi1_cubed()},
        {"dsg [2]", {1, 3, 4, 8, 11, 16, 21, 28, 34, 43, 51, 61, 71}, P({1, 1}) * P({1, 1, 1}) * phi1_cubed()},
        {"aniso -+", {1, 3, 7, 17, 41, 99, 239}, P({1, -2, -1})},
        {"aniso ++", {1, 2, 4, 7, 14, 28, 56}, P({1, -2})},
        {"aniso +-", {1, 2, 5, 10, 20, 40, 80}, P({1, -2})},
        {"aniso --", {1, 2, 4, 8, 16, 32, 64}, P({1, -2})},
    };
    {
        const auto& s = listed[4].seq;
        const auto prod = analysis::series(IntPoly(std::vector<analysis::Int>(s.begin(), s.end())) * q4b2,
                                           P({1}), s.size());
        bool finite = true;
        for (std::size_t k = q4b2.degree(); k < prod.size(); ++k) finite = finite && prod[k] == 0;
        c.require(finite, "q4 [2] oracle: series times denominator is not a polynomial");
    }
    int tentative = 0;
    for (const auto& l : listed) {
        const auto rec = analysis::fit_recurrence(l.seq, 8, 4);
        if (!rec) {
            c.require(false, l.what + ": no fit");
            continue;
        }
        const auto gf = analysis::generating_function(l.seq, *rec);
        c.require(gf.denominator == l.den, l.what + ": denominator " + analysis::to_string(gf.denominator));
        const bool short_input = static_cast<int>(l.seq.size()) < 2 * rec->order + rec->transient + 2;
        c.require(rec->tentative == short_input, l.what + ": tentative flag");
        tentative += rec->tentative;
    }
    const auto cut = analysis::fit_recurrence(Seq{1, 2, 4, 9, 21, 50, 120}, 8, 4);
    c.require(cut && cut->tentative, "seven dcr terms not reported tentative");
    if (c.ok) c.why << listed.size() << " listed prefixes recover their denominators, " << tentative
                    << " flagged tentative";
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Check()>>> criteria = {
        {1, dcr_generic},      {2, dcr_integrable},     {3, q4_fundamental},
        {4, q4_staircase},     {5, sine_gordon},        {6, anisotropic},
        {7, algebraic_integer}, {8, oracle_equivalence}, {9, back_substitution},
        {10, fit_robustness}};
    int failed = 0;
    for (const auto& [k, fn] : criteria) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.why << "exception: " << e.what();
        }
        std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << k << ": " << c.why.str() << "\n";
        failed += !c.ok;
    }
    std::cout << (10 - failed) << "/10 criteria pass\n";
    return failed ? 1 : 0;
}
