#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadent/analysis.hpp"
#include "quadent/lattice.hpp"

namespace quadent::report {

inline constexpr int kSchemaVersion = 1;

struct SequenceReport {
    int border = 0;  // 0 for a fundamental run or a user sequence
    std::vector<std::int64_t> values;
    int disagreements = 0;
    std::vector<std::uint64_t> seeds;
    int retries = 0;
    std::optional<analysis::LinearRecurrence> fit;
    std::optional<analysis::RationalGF> gf;
    std::optional<analysis::EntropyReport> entropy;
    std::optional<analysis::PolynomialGrowth> polynomial;
    std::vector<std::string> warnings;
};

struct Report {
    int schema_version = kSchemaVersion;
    std::string command = "run";
    std::string equation;
    std::string params_mode = "generic";
    lattice::RunMode mode;
    int steps = 0;
    int trials = 0;
    std::uint64_t prime = 0;
    std::uint64_t seed = 0;
    int max_order = 8;
    int max_transient = 4;
    std::vector<SequenceReport> sequences;
    std::size_t verified_cells = 0;
    double timing_ms = 0.0;
};

/// Fit, generating function, entropy and interpolation for one sequence.
/// A failed fit leaves the optional fields empty.
SequenceReport analyze_sequence(std::span<const std::int64_t> values, int max_order,
                                int max_transient);

nlohmann::json to_json(const Report& r);
Report from_json(const nlohmann::json& j);

std::string to_csv(const Report& r);
std::string to_text(const Report& r);

/// Denominator with its cyclotomic factors written out, e.g.
/// "(1 - 2*s - s^2) (1 - s)^3".
std::string factored_denominator(const analysis::RationalGF& gf);

/// Entry point shared by the quadent executable and the tests. Exit status:
/// 0 success, 1 usage error, 2 singular evolution, 3 no fit.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quadent::report
