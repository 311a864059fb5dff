#include "quadent/lattice.hpp"

#include <algorithm>
#include <exception>
#include <future>
#include <sstream>

#include "quadent/rng.hpp"

namespace quadent::lattice {

using arith::Elem;
using arith::FieldPoly;
using arith::PrimeField;
using arith::ReducedFraction;
using equation::Orientation;
using equation::SpecializedRelation;

void StaircaseSpec::validate() const {
    if (lambda1 == 0 || lambda2 == 0)
        throw std::invalid_argument("staircase step sizes lambda1, lambda2 must be nonzero");
    if (steps < 1) throw std::invalid_argument("staircase needs at least one step");
}

StaircaseSpec StaircaseSpec::fundamental(Orientation o, int steps) {
    return StaircaseSpec{equation::sign1(o), equation::sign2(o), steps};
}

std::pair<int, int> to_lattice(const StaircaseSpec& s, Vertex v) {
    const int sg1 = s.lambda1 > 0 ? 1 : -1;
    const int sg2 = s.lambda2 > 0 ? 1 : -1;
    return {sg1 * (s.width() - v.i), sg2 * v.j};
}

std::vector<Vertex> staircase_vertices(const StaircaseSpec& s) {
    s.validate();
    std::vector<Vertex> out;
    out.reserve(s.vertex_count());
    Vertex v{s.width(), 0};
    out.push_back(v);
    for (int step = 0; step < s.steps; ++step) {
        for (int t = 0; t < s.l1(); ++t) {
            --v.i;
            out.push_back(v);
        }
        for (int t = 0; t < s.l2(); ++t) {
            ++v.j;
            out.push_back(v);
        }
    }
    return out;
}

ReducedFraction SeedAssignment::value(const PrimeField& F, std::size_t k) const {
    return ReducedFraction::make(F, FieldPoly::linear(alpha.at(k), beta.at(k)),
                                 FieldPoly::linear(alpha0, beta0));
}

SeedAssignment make_staircase(const StaircaseSpec& spec, const PrimeField& F, Elem alpha0,
                              Elem beta0, std::vector<Elem> alpha, std::vector<Elem> beta) {
    SeedAssignment s;
    s.spec = spec;
    s.vertices = staircase_vertices(spec);
    if (alpha.size() != s.vertices.size() || beta.size() != s.vertices.size())
        throw std::invalid_argument("seed constants do not match the staircase vertex count");
    if (alpha0 == 0 && beta0 == 0) throw std::invalid_argument("shared denominator is zero");
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (F.mul(alpha[k], beta0) == F.mul(alpha0, beta[k]))
            throw std::invalid_argument("seed value " + std::to_string(k + 1) +
                                        " does not have degree 1");
    }
    s.alpha0 = alpha0;
    s.beta0 = beta0;
    s.alpha = std::move(alpha);
    s.beta = std::move(beta);
    return s;
}

SeedAssignment build_staircase(const StaircaseSpec& spec, const PrimeField& F,
                               std::uint64_t seed) {
    const std::size_t q = static_cast<std::size_t>(spec.vertex_count());
    SplitMix64 rng(seed ^ 0x57a1c45eULL);
    Elem a0 = 0, b0 = 0;
    while (a0 == 0 && b0 == 0) {
        a0 = uniform_elem(rng, F.modulus());
        b0 = uniform_elem(rng, F.modulus());
    }
    std::vector<Elem> alpha(q), beta(q);
    for (std::size_t k = 0; k < q; ++k) {
        do {
            alpha[k] = uniform_elem(rng, F.modulus());
            beta[k] = uniform_elem(rng, F.modulus());
        } while (F.mul(alpha[k], b0) == F.mul(a0, beta[k]));
    }
    return make_staircase(spec, F, a0, b0, std::move(alpha), std::move(beta));
}

DegreePattern::DegreePattern(StaircaseSpec spec, bool retain_values)
    : spec_(spec), retain_values_(retain_values) {
    const std::size_t n = static_cast<std::size_t>(spec.width() + 1) * (spec.height() + 1);
    degree_.assign(n, -1);
    stair_.assign(n, 0);
    value_.resize(n);
}

std::size_t DegreePattern::index(int i, int j) const {
    return static_cast<std::size_t>(j) * (width() + 1) + i;
}

int DegreePattern::degree(int i, int j) const {
    if (i < 0 || j < 0 || i > width() || j > height()) return -1;
    return degree_[index(i, j)];
}

bool DegreePattern::on_staircase(int i, int j) const {
    if (i < 0 || j < 0 || i > width() || j > height()) return false;
    return stair_[index(i, j)] != 0;
}

const ReducedFraction* DegreePattern::value(int i, int j) const {
    if (i < 0 || j < 0 || i > width() || j > height()) return nullptr;
    const auto& v = value_[index(i, j)];
    return v ? &*v : nullptr;
}

std::vector<std::int64_t> DegreePattern::border1() const {
    std::vector<std::int64_t> out;
    for (int i = 0; i <= width(); ++i) out.push_back(degree(i, height()));
    return out;
}

std::vector<std::int64_t> DegreePattern::border2() const {
    std::vector<std::int64_t> out;
    for (int j = 0; j <= height(); ++j) out.push_back(degree(width(), j));
    return out;
}

DegreePattern evolve(const PrimeField& F, const SpecializedRelation& rel,
                     const SeedAssignment& stair, const EvolveOptions& opts) {
    const StaircaseSpec& spec = stair.spec;
    const SpecializedRelation canon =
        equation::reflect(rel, spec.reflect1() != rel.reflect1, spec.reflect2() != rel.reflect2);

    DegreePattern pat(spec, opts.retain_values);
    const int W = spec.width(), H = spec.height();
    std::vector<int> top(W + 1, -1);
    for (std::size_t k = 0; k < stair.vertices.size(); ++k) {
        const Vertex v = stair.vertices[k];
        const std::size_t idx = pat.index(v.i, v.j);
        pat.stair_[idx] = 1;
        pat.degree_[idx] = 1;
        pat.value_[idx] = stair.value(F, k);
        top[v.i] = std::max(top[v.i], v.j);
    }

    auto keep = [&](int i, int j) { return opts.retain_values || i == W || j == H; };
    std::size_t solved = 0;
    for (int k = 0; k <= W + H; ++k) {
        for (int i = std::max(0, k - H); i <= std::min(W, k); ++i) {
            const int j = k - i;
            if (j <= top[i]) continue;
            const auto& v00 = pat.value_[pat.index(i - 1, j - 1)];
            const auto& v10 = pat.value_[pat.index(i, j - 1)];
            const auto& v01 = pat.value_[pat.index(i - 1, j)];
            if (!v00 || !v10 || !v01)
                throw std::logic_error("evolution order reached a cell with unknown neighbours");
            ReducedFraction v11;
            try {
                v11 = equation::solve_corner(F, canon, *v00, *v10, *v01);
            } catch (const equation::SingularCell& e) {
                throw equation::SingularCell(e.what(), i, j);
            }
            const bool check = opts.verify == EvolveOptions::Verify::all ||
                               (opts.verify == EvolveOptions::Verify::sampled &&
                                solved % static_cast<std::size_t>(std::max(1, opts.sample_stride)) ==
                                    0);
            if (check) {
                const ReducedFraction r = equation::evaluate_relation(F, canon, {*v00, *v10, *v01, v11});
                if (!r.is_zero() || !arith::is_reduced(F, v11)) {
                    std::ostringstream msg;
                    msg << "back-substitution failed at canonical cell (" << i << ", " << j << ")";
                    throw BackSubstitutionFailure(msg.str());
                }
                ++pat.verified_cells;
            }
            ++solved;
            const std::size_t idx = pat.index(i, j);
            pat.degree_[idx] = arith::fraction_degree(v11);
            pat.value_[idx] = std::move(v11);
        }
        if (!opts.retain_values && k >= 2) {
            const int d = k - 2;
            for (int i = std::max(0, d - H); i <= std::min(W, d); ++i) {
                if (!keep(i, d - i)) pat.value_[pat.index(i, d - i)].reset();
            }
        }
    }
    return pat;
}

bool diagonal_constant(const DegreePattern& pattern) {
    const int N = pattern.spec().steps;
    if (pattern.spec().l1() != 1 || pattern.spec().l2() != 1) return false;
    std::vector<int> by_distance(N + 1, -1);
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            const int d = pattern.degree(i, j);
            if (d < 0) continue;
            const int n = std::max(0, i + j - N);
            if (by_distance[n] < 0)
                by_distance[n] = d;
            else if (by_distance[n] != d)
                return false;
        }
    }
    return true;
}

StaircaseSpec RunMode::staircase_spec(int steps) const {
    if (kind == Kind::fundamental) return StaircaseSpec::fundamental(orientation, steps);
    StaircaseSpec s{lambda1, lambda2, steps};
    s.validate();
    return s;
}

std::string RunMode::label() const {
    if (kind == Kind::fundamental) return std::string(equation::to_string(orientation));
    return "lambda=" + std::to_string(lambda1) + "," + std::to_string(lambda2);
}

namespace {

struct TrialOutcome {
    std::vector<std::int64_t> b1, b2;
    std::uint64_t seed = 0;
    int retries = 0;
    std::size_t verified = 0;
};

TrialOutcome run_trial(const equation::QuadRelationSpec& eq, const StaircaseSpec& spec,
                       const PrimeField& F, const RunOptions& opts, int trial) {
    std::string last;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
        const std::uint64_t seed = derive_seed(opts.base_seed, static_cast<std::uint64_t>(trial),
                                               static_cast<std::uint64_t>(attempt));
        const SpecializedRelation rel = equation::specialize(eq, F, derive_seed(seed, 1));
        const SeedAssignment stair = build_staircase(spec, F, derive_seed(seed, 2));
        try {
            DegreePattern pat = evolve(F, rel, stair, opts.evolve);
            TrialOutcome out;
            out.b1 = pat.border1();
            out.b2 = pat.border2();
            out.seed = seed;
            out.retries = attempt;
            out.verified = pat.verified_cells;
            return out;
        } catch (const equation::SingularCell& e) {
            std::ostringstream m;
            m << "singular cell at canonical (" << e.i << ", " << e.j << ") with seed " << seed;
            last = m.str();
        }
    }
    throw SingularEvolution("singular evolution: trial " + std::to_string(trial) + " failed " +
                            std::to_string(opts.max_retries + 1) + " attempts; last: " + last);
}

DegreeSequence combine(const std::vector<TrialOutcome>& trials, bool first,
                       SequenceProvenance prov) {
    DegreeSequence out;
    const auto& ref = first ? trials[0].b1 : trials[0].b2;
    out.values.assign(ref.size(), 0);
    for (std::size_t n = 0; n < ref.size(); ++n) {
        std::int64_t mx = 0;
        bool differ = false;
        for (const auto& t : trials) {
            const std::int64_t d = first ? t.b1[n] : t.b2[n];
            if (d != ref[n]) differ = true;
            mx = std::max(mx, d);
        }
        out.values[n] = mx;
        if (differ) ++prov.disagreements;
    }
    for (const auto& t : trials) {
        prov.seeds.push_back(t.seed);
        prov.retries += t.retries;
    }
    out.provenance = std::move(prov);
    return out;
}

}  // namespace

RunResult degree_run(const equation::QuadRelationSpec& eq, const RunMode& mode, int steps,
                     const PrimeField& F, const RunOptions& opts) {
    if (opts.trials < 1) throw std::invalid_argument("need at least one trial");
    if (steps < 1) throw std::invalid_argument("need at least one step");
    const StaircaseSpec spec = mode.staircase_spec(steps);
    if (!equation::reflection_allowed(eq, spec.reflect1(), spec.reflect2())) {
        int corner = equation::y11;
        if (spec.reflect1()) corner ^= 1;
        if (spec.reflect2()) corner ^= 2;
        throw equation::ConfigError("mode " + mode.label() + " solves for " +
                                    std::string(equation::kCornerNames[corner]) + ", which '" +
                                    eq.name + "' cannot be solved for");
    }

    std::vector<TrialOutcome> outcomes(opts.trials);
    if (opts.parallel && opts.trials > 1) {
        std::vector<std::future<TrialOutcome>> futs;
        for (int t = 0; t < opts.trials; ++t)
            futs.push_back(std::async(std::launch::async, run_trial, std::cref(eq),
                                      std::cref(spec), std::cref(F), std::cref(opts), t));
        for (int t = 0; t < opts.trials; ++t) outcomes[t] = futs[t].get();
    } else {
        for (int t = 0; t < opts.trials; ++t) outcomes[t] = run_trial(eq, spec, F, opts, t);
    }

    SequenceProvenance prov;
    prov.equation = eq.name;
    prov.mode = mode.label();
    prov.trials = opts.trials;
    prov.modulus = F.modulus();

    RunResult res;
    res.mode = mode;
    res.steps = steps;
    for (const auto& o : outcomes) res.verified_cells += o.verified;
    if (mode.kind == RunMode::Kind::fundamental) {
        DegreeSequence s1 = combine(outcomes, true, prov);
        DegreeSequence s2 = combine(outcomes, false, prov);
        if (s1.values != s2.values)
            throw std::runtime_error("fundamental evolution of '" + eq.name +
                                     "' gives different degrees on its two borders");
        s1.provenance.disagreements =
            std::max(s1.provenance.disagreements, s2.provenance.disagreements);
        res.sequences.push_back(std::move(s1));
    } else {
        prov.border = 1;
        res.sequences.push_back(combine(outcomes, true, prov));
        prov.border = 2;
        res.sequences.push_back(combine(outcomes, false, prov));
    }
    return res;
}

DegreeSequence fundamental_run(const equation::QuadRelationSpec& eq, Orientation o, int steps,
                               const PrimeField& F, const RunOptions& opts) {
    return degree_run(eq, RunMode::fundamental(o), steps, F, opts).sequences.at(0);
}

BorderSequences staircase_run(const equation::QuadRelationSpec& eq, int lambda1, int lambda2,
                              int steps, const PrimeField& F, const RunOptions& opts) {
    RunResult r = degree_run(eq, RunMode::staircase(lambda1, lambda2), steps, F, opts);
    return {std::move(r.sequences.at(0)), std::move(r.sequences.at(1))};
}

}  // namespace quadent::lattice
