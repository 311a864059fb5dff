#pragma once

// Restricted staircase initial data, evolution over the region it
// determines, and extraction of degree sequences.
//
// All evolution happens in a canonical frame where the staircase starts at
// (W, 0), repeatedly steps l1 to the left and then l2 up, and ends at
// (0, H), with W = N l1 and H = N l2. The populated region lies above it and
// every cell is solved for its upper-right corner. The lattice frame of a
// diagonal [lambda1, lambda2] is recovered by reflecting n1 when lambda1 > 0
// and n2 when lambda2 < 0.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quadent/arith.hpp"
#include "quadent/equation.hpp"

namespace quadent::lattice {

struct StaircaseSpec {
    int lambda1 = 1;
    int lambda2 = 1;
    int steps = 1;

    int l1() const noexcept { return lambda1 < 0 ? -lambda1 : lambda1; }
    int l2() const noexcept { return lambda2 < 0 ? -lambda2 : lambda2; }
    int width() const noexcept { return steps * l1(); }
    int height() const noexcept { return steps * l2(); }
    int vertex_count() const noexcept { return steps * (l1() + l2()) + 1; }
    double slope() const noexcept { return static_cast<double>(lambda2) / lambda1; }
    bool reflect1() const noexcept { return lambda1 > 0; }
    bool reflect2() const noexcept { return lambda2 < 0; }

    /// Throws std::invalid_argument unless lambda1, lambda2 != 0 and steps >= 1.
    void validate() const;

    static StaircaseSpec fundamental(equation::Orientation o, int steps);
};

struct Vertex {
    int i = 0;
    int j = 0;
    bool operator==(const Vertex&) const = default;
};

/// Canonical-frame vertex to lattice coordinates, with the staircase's first
/// vertex at the origin.
std::pair<int, int> to_lattice(const StaircaseSpec& s, Vertex v);

/// The q staircase vertices in canonical coordinates, in walking order.
std::vector<Vertex> staircase_vertices(const StaircaseSpec& s);

/// y[V_k] = (alpha_k + beta_k x) / (alpha_0 + beta_0 x).
struct SeedAssignment {
    StaircaseSpec spec;
    arith::Elem alpha0 = 0;
    arith::Elem beta0 = 0;
    std::vector<arith::Elem> alpha;
    std::vector<arith::Elem> beta;
    std::vector<Vertex> vertices;

    arith::ReducedFraction value(const arith::PrimeField& F, std::size_t k) const;
};

SeedAssignment build_staircase(const StaircaseSpec& spec, const arith::PrimeField& F,
                               std::uint64_t seed);

/// Explicit seed constants; rejects assignments with a non-degree-1 vertex.
SeedAssignment make_staircase(const StaircaseSpec& spec, const arith::PrimeField& F,
                              arith::Elem alpha0, arith::Elem beta0,
                              std::vector<arith::Elem> alpha, std::vector<arith::Elem> beta);

class DegreePattern;

struct EvolveOptions {
    enum class Verify { none, sampled, all };
    /// Keep every value, or only the two latest anti-diagonals plus borders.
    bool retain_values = true;
    /// Back-substitution of solved corners into the relation.
    Verify verify = Verify::sampled;
    int sample_stride = 16;
};

/// Fills the populated half-rectangle anti-diagonal by anti-diagonal. The
/// relation may be given in lattice labels or already reflected for the
/// staircase; it is brought to the canonical frame either way. SingularCell
/// carries the canonical coordinates of the failing cell.
DegreePattern evolve(const arith::PrimeField& F, const equation::SpecializedRelation& rel,
                     const SeedAssignment& stair, const EvolveOptions& opts = {});

class DegreePattern {
   public:
    DegreePattern() = default;
    DegreePattern(StaircaseSpec spec, bool retain_values);

    const StaircaseSpec& spec() const noexcept { return spec_; }
    int width() const noexcept { return spec_.width(); }
    int height() const noexcept { return spec_.height(); }

    bool populated(int i, int j) const { return degree(i, j) >= 0; }
    /// -1 outside the computed half-rectangle.
    int degree(int i, int j) const;
    bool on_staircase(int i, int j) const;
    /// nullptr when the value was not retained.
    const arith::ReducedFraction* value(int i, int j) const;

    /// Edge along n1 (top edge, left to right): N l1 + 1 entries.
    std::vector<std::int64_t> border1() const;
    /// Edge along n2 (right edge, bottom to top): N l2 + 1 entries.
    std::vector<std::int64_t> border2() const;

    std::size_t verified_cells = 0;

   private:
    friend DegreePattern evolve(const arith::PrimeField&, const equation::SpecializedRelation&,
                                const SeedAssignment&, const EvolveOptions&);
    std::size_t index(int i, int j) const;

    StaircaseSpec spec_;
    bool retain_values_ = true;
    std::vector<int> degree_;
    std::vector<char> stair_;
    std::vector<std::optional<arith::ReducedFraction>> value_;
};

/// Exact failure of a back-substitution check.
class BackSubstitutionFailure : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// For a fundamental pattern: degree at (i, j) depends only on i + j - N.
bool diagonal_constant(const DegreePattern& pattern);

struct SequenceProvenance {
    std::string equation;
    std::string mode;  // "++" or "lambda=1,2"
    int border = 0;    // 0: fundamental (both borders agree), else nu
    int trials = 0;
    std::vector<std::uint64_t> seeds;
    std::uint64_t modulus = 0;
    int disagreements = 0;
    int retries = 0;
};

struct DegreeSequence {
    std::vector<std::int64_t> values;
    SequenceProvenance provenance;
};

struct BorderSequences {
    DegreeSequence seq1;
    DegreeSequence seq2;
};

struct RunMode {
    enum class Kind { fundamental, staircase };
    Kind kind = Kind::fundamental;
    equation::Orientation orientation = equation::Orientation::pp;
    int lambda1 = 1;
    int lambda2 = 1;

    static RunMode fundamental(equation::Orientation o) { return {Kind::fundamental, o, 0, 0}; }
    static RunMode staircase(int l1, int l2) {
        return {Kind::staircase, equation::Orientation::pp, l1, l2};
    }
    StaircaseSpec staircase_spec(int steps) const;
    std::string label() const;
};

struct RunOptions {
    int trials = 3;
    std::uint64_t base_seed = 0;
    int max_retries = 5;
    bool parallel = true;
    EvolveOptions evolve;
    std::string params_mode = "generic";
};

/// Every trial exhausted its retries on singular cells.
class SingularEvolution : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct RunResult {
    RunMode mode;
    int steps = 0;
    /// One sequence in fundamental mode, the two border sequences otherwise.
    std::vector<DegreeSequence> sequences;
    std::size_t verified_cells = 0;
};

/// T independent trials, per-position maximum of the degrees.
RunResult degree_run(const equation::QuadRelationSpec& eq, const RunMode& mode, int steps,
                     const arith::PrimeField& F, const RunOptions& opts = {});

DegreeSequence fundamental_run(const equation::QuadRelationSpec& eq, equation::Orientation o,
                               int steps, const arith::PrimeField& F,
                               const RunOptions& opts = {});

BorderSequences staircase_run(const equation::QuadRelationSpec& eq, int lambda1, int lambda2,
                              int steps, const arith::PrimeField& F,
                              const RunOptions& opts = {});

}  // namespace quadent::lattice
