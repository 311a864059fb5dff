#include "quadent/report.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "quadent/equation.hpp"

namespace quadent::report {

using analysis::Int;
using analysis::IntPoly;
using analysis::Rat;
using nlohmann::json;

SequenceReport analyze_sequence(std::span<const std::int64_t> values, int max_order,
                                int max_transient) {
    SequenceReport s;
    s.values.assign(values.begin(), values.end());
    s.polynomial = analysis::polynomial_growth_check(values);
    s.fit = analysis::fit_recurrence(values, max_order, max_transient);
    if (!s.fit) {
        s.warnings.push_back("no linear recurrence with order <= " + std::to_string(max_order) +
                             " and transient <= " + std::to_string(max_transient));
        return s;
    }
    if (s.fit->tentative)
        s.warnings.push_back("tentative fit: " + std::to_string(s.fit->verified) +
                             " entries beyond the solved window");
    s.gf = analysis::generating_function(values, *s.fit);
    try {
        s.entropy = analysis::entropy_report(*s.gf, values);
    } catch (const analysis::ImplausibleFit& e) {
        s.warnings.push_back(e.what());
    }
    return s;
}

namespace {

json int_to_json(const Int& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() &&
        v <= std::numeric_limits<std::int64_t>::max())
        return v.convert_to<std::int64_t>();
    return v.str();
}

Int int_from_json(const json& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
    return Int(j.get<std::int64_t>());
}

json poly_to_json(const IntPoly& p) {
    json a = json::array();
    for (const auto& c : p.coeffs) a.push_back(int_to_json(c));
    return a;
}

IntPoly poly_from_json(const json& j) {
    std::vector<Int> c;
    for (const auto& e : j) c.push_back(int_from_json(e));
    return IntPoly(std::move(c));
}

std::string rat_to_string(const Rat& r) {
    std::string s = boost::multiprecision::numerator(r).str();
    if (boost::multiprecision::denominator(r) != 1)
        s += "/" + boost::multiprecision::denominator(r).str();
    return s;
}

Rat rat_from_string(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

json mode_to_json(const Report& r) {
    if (r.command != "run") return nullptr;
    if (r.mode.kind == lattice::RunMode::Kind::fundamental)
        return {{"kind", "fundamental"},
                {"diagonal", std::string(equation::to_string(r.mode.orientation))}};
    return {{"kind", "staircase"}, {"lambda", {r.mode.lambda1, r.mode.lambda2}}};
}

json fit_to_json(const SequenceReport& s) {
    if (!s.fit) return nullptr;
    json c = json::array();
    for (const auto& v : s.fit->coefficients) c.push_back(int_to_json(v));
    return {{"order", s.fit->order},
            {"coefficients", c},
            {"transient", s.fit->transient},
            {"verified", s.fit->verified},
            {"tentative", s.fit->tentative},
            {"gf_numerator", poly_to_json(s.gf->numerator)},
            {"gf_denominator", poly_to_json(s.gf->denominator)}};
}

json entropy_to_json(const SequenceReport& s) {
    if (!s.entropy) return nullptr;
    const auto& e = *s.entropy;
    json cyc = json::array();
    for (const auto& f : e.cyclotomic) cyc.push_back({{"index", f.index}, {"multiplicity", f.multiplicity}});
    return {{"value", e.entropy},
            {"growth", std::string(analysis::to_string(e.growth))},
            {"growth_degree", e.growth == analysis::Growth::polynomial ? json(e.growth_degree)
                                                                       : json(nullptr)},
            {"witness", poly_to_json(e.witness)},
            {"witness_root", e.witness_root},
            {"smallest_pole_modulus", e.smallest_pole_modulus},
            {"cyclotomic", cyc},
            {"remainder", poly_to_json(e.remainder)},
            {"warnings", e.warnings}};
}

json sequence_to_json(const SequenceReport& s) {
    json poly = nullptr;
    if (s.polynomial) {
        json c = json::array();
        for (const auto& v : s.polynomial->coefficients) c.push_back(rat_to_string(v));
        poly = {{"degree", s.polynomial->degree},
                {"coefficients", c},
                {"first_index", s.polynomial->first_index}};
    }
    return {{"border", s.border},
            {"values", s.values},
            {"disagreements", s.disagreements},
            {"seeds", s.seeds},
            {"retries", s.retries},
            {"fit", fit_to_json(s)},
            {"entropy", entropy_to_json(s)},
            {"polynomial_growth", poly},
            {"warnings", s.warnings}};
}

SequenceReport sequence_from_json(const json& j) {
    SequenceReport s;
    s.border = j.at("border").get<int>();
    s.values = j.at("values").get<std::vector<std::int64_t>>();
    s.disagreements = j.at("disagreements").get<int>();
    s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    s.retries = j.at("retries").get<int>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (const auto& f = j.at("fit"); !f.is_null()) {
        analysis::LinearRecurrence rec;
        rec.order = f.at("order").get<int>();
        for (const auto& c : f.at("coefficients")) rec.coefficients.push_back(int_from_json(c));
        rec.transient = f.at("transient").get<int>();
        rec.verified = f.at("verified").get<int>();
        rec.tentative = f.at("tentative").get<bool>();
        s.fit = rec;
        s.gf = analysis::RationalGF{poly_from_json(f.at("gf_numerator")),
                                    poly_from_json(f.at("gf_denominator"))};
    }
    if (const auto& e = j.at("entropy"); !e.is_null()) {
        analysis::EntropyReport rep;
        rep.entropy = e.at("value").get<double>();
        const auto g = e.at("growth").get<std::string>();
        rep.growth = g == "exponential"  ? analysis::Growth::exponential
                     : g == "polynomial" ? analysis::Growth::polynomial
                                         : analysis::Growth::undetermined;
        rep.growth_degree = e.at("growth_degree").is_null() ? -1 : e.at("growth_degree").get<int>();
        rep.witness = poly_from_json(e.at("witness"));
        rep.witness_root = e.at("witness_root").get<double>();
        rep.smallest_pole_modulus = e.at("smallest_pole_modulus").get<double>();
        for (const auto& c : e.at("cyclotomic"))
            rep.cyclotomic.push_back({c.at("index").get<int>(), c.at("multiplicity").get<int>()});
        rep.remainder = poly_from_json(e.at("remainder"));
        rep.warnings = e.at("warnings").get<std::vector<std::string>>();
        s.entropy = rep;
    }
    if (const auto& p = j.at("polynomial_growth"); !p.is_null()) {
        analysis::PolynomialGrowth pg;
        pg.degree = p.at("degree").get<int>();
        for (const auto& c : p.at("coefficients"))
            pg.coefficients.push_back(rat_from_string(c.get<std::string>()));
        pg.first_index = p.at("first_index").get<int>();
        s.polynomial = pg;
    }
    return s;
}

}  // namespace

json to_json(const Report& r) {
    json seqs = json::array();
    for (const auto& s : r.sequences) seqs.push_back(sequence_to_json(s));
    json j = {{"schema_version", r.schema_version},
              {"command", r.command},
              {"equation", r.equation},
              {"params_mode", r.params_mode},
              {"mode", mode_to_json(r)},
              {"steps", r.steps},
              {"trials", r.trials},
              {"prime", r.prime},
              {"seed", r.seed},
              {"max_order", r.max_order},
              {"max_transient", r.max_transient},
              {"verified_cells", r.verified_cells},
              {"sequences", seqs},
              {"fit", r.sequences.empty() ? json(nullptr) : seqs[0]["fit"]},
              {"entropy", r.sequences.empty() ? json(nullptr) : seqs[0]["entropy"]},
              {"timing_ms", r.timing_ms}};
    return j;
}

Report from_json(const json& j) {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion)
        throw std::runtime_error("unsupported report schema_version " +
                                 std::to_string(r.schema_version));
    r.command = j.at("command").get<std::string>();
    r.equation = j.at("equation").get<std::string>();
    r.params_mode = j.at("params_mode").get<std::string>();
    if (const auto& m = j.at("mode"); !m.is_null()) {
        if (m.at("kind") == "fundamental") {
            const auto o = equation::parse_orientation(m.at("diagonal").get<std::string>());
            if (!o) throw std::runtime_error("bad diagonal in report");
            r.mode = lattice::RunMode::fundamental(*o);
        } else {
            r.mode = lattice::RunMode::staircase(m.at("lambda").at(0).get<int>(),
                                                 m.at("lambda").at(1).get<int>());
        }
    }
    r.steps = j.at("steps").get<int>();
    r.trials = j.at("trials").get<int>();
    r.prime = j.at("prime").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.max_order = j.at("max_order").get<int>();
    r.max_transient = j.at("max_transient").get<int>();
    r.verified_cells = j.at("verified_cells").get<std::size_t>();
    for (const auto& s : j.at("sequences")) r.sequences.push_back(sequence_from_json(s));
    r.timing_ms = j.at("timing_ms").get<double>();
    return r;
}

std::string to_csv(const Report& r) {
    std::ostringstream os;
    os << "border,n,degree\n";
    for (const auto& s : r.sequences)
        for (std::size_t n = 0; n < s.values.size(); ++n)
            os << s.border << ',' << n << ',' << s.values[n] << '\n';
    return os.str();
}

namespace {

std::string paren(const IntPoly& p) {
    std::string s = analysis::to_string(p);
    return p.degree() >= 1 && (std::count(s.begin(), s.end(), ' ') > 0) ? "(" + s + ")" : s;
}

std::string recurrence_text(const analysis::LinearRecurrence& rec) {
    std::ostringstream os;
    os << "d(n) =";
    bool first = true;
    for (int i = 1; i <= rec.order; ++i) {
        const Int& c = rec.coefficients[i - 1];
        if (c == 0) continue;
        const Int mag = c < 0 ? Int(-c) : c;
        os << (first ? (c < 0 ? " -" : " ") : (c < 0 ? " - " : " + "));
        first = false;
        if (mag != 1) os << mag << ' ';
        os << "d(n-" << i << ")";
    }
    os << "  for n >= " << rec.transient + rec.order;
    return os.str();
}

}  // namespace

std::string factored_denominator(const analysis::RationalGF& gf) {
    const auto split = analysis::cyclotomic_strip(gf.denominator);
    std::vector<std::string> parts;
    if (split.remainder.degree() >= 1) parts.push_back(paren(split.remainder));
    auto factor_text = [](int k) {
        IntPoly c = analysis::cyclotomic(k);
        if (c[0] < 0) c = -c;
        return "(" + analysis::to_string(c) + ")";
    };
    for (const auto& f : split.factors) {
        if (f.index == 1) continue;
        parts.push_back(factor_text(f.index) +
                        (f.multiplicity > 1 ? "^" + std::to_string(f.multiplicity) : ""));
    }
    for (const auto& f : split.factors) {
        if (f.index != 1) continue;
        parts.push_back(factor_text(1) +
                        (f.multiplicity > 1 ? "^" + std::to_string(f.multiplicity) : ""));
    }
    if (parts.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " " : "") + parts[i];
    return out;
}

std::string to_text(const Report& r) {
    std::ostringstream os;
    if (r.command == "run") {
        os << "equation  " << r.equation << " (" << r.params_mode << ")\n";
        os << "mode      ";
        if (r.mode.kind == lattice::RunMode::Kind::fundamental)
            os << "diagonal " << equation::to_string(r.mode.orientation);
        else
            os << "lambda " << r.mode.lambda1 << "," << r.mode.lambda2;
        os << ", N = " << r.steps << ", trials = " << r.trials << ", prime = " << r.prime
           << ", seed = " << r.seed << "\n";
    }
    for (const auto& s : r.sequences) {
        os << "\n";
        if (s.border > 0) os << "border " << s.border << "\n";
        os << "degrees   ";
        for (std::size_t n = 0; n < s.values.size(); ++n) os << (n ? ", " : "") << s.values[n];
        os << "\n";
        if (s.disagreements > 0) os << "trial disagreements  " << s.disagreements << "\n";
        if (s.fit) {
            os << "recurrence  " << recurrence_text(*s.fit) << (s.fit->tentative ? "  (tentative)" : "")
               << "\n";
            os << "g(s) = " << paren(s.gf->numerator) << " / " << factored_denominator(*s.gf) << "\n";
        }
        if (s.entropy) {
            const auto& e = *s.entropy;
            os << std::setprecision(15);
            os << "entropy   " << e.entropy << "  (" << analysis::to_string(e.growth);
            if (e.growth == analysis::Growth::polynomial) os << " of degree " << e.growth_degree;
            os << ")\n";
            if (e.growth == analysis::Growth::exponential) {
                os << "smallest pole modulus  " << e.smallest_pole_modulus << "\n";
                os << "witness   " << analysis::to_string(e.witness) << "  largest root "
                   << e.witness_root << "\n";
            }
            for (const auto& w : e.warnings) os << "warning: " << w << "\n";
        }
        if (s.polynomial) {
            os << "interpolation  d(n) =";
            bool first = true;
            for (std::size_t k = 0; k < s.polynomial->coefficients.size(); ++k) {
                const Rat& c = s.polynomial->coefficients[k];
                if (c == 0) continue;
                os << (first ? " " : (c < 0 ? " - " : " + "));
                const Rat mag = (!first && c < 0) ? Rat(-c) : c;
                first = false;
                if (k == 0 || (mag != 1 && mag != -1)) os << rat_to_string(mag) << (k ? "*" : "");
                if (k >= 1 && mag == -1) os << "-";
                if (k >= 1) os << "n";
                if (k >= 2) os << "^" << k;
            }
            os << "  for n >= " << s.polynomial->first_index << "\n";
        }
        for (const auto& w : s.warnings) os << "warning: " << w << "\n";
    }
    return os.str();
}

namespace {

std::vector<std::int64_t> parse_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw std::invalid_argument("empty entry in '" + text + "'");
        const std::string v = item.substr(b, e - b + 1);
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
        out.push_back(x);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct Output {
    std::string path;
    std::string format = "json";
};

void emit(const Report& r, const Output& o, std::ostream& out) {
    std::string text;
    if (o.format == "json")
        text = to_json(r).dump(2) + "\n";
    else if (o.format == "csv")
        text = to_csv(r);
    else
        text = to_text(r);
    if (o.path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + o.path + "'");
    f << text;
}

int status_of(const Report& r) {
    for (const auto& s : r.sequences)
        if (!s.entropy) return 3;
    return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Degree growth and algebraic entropy of quad lattice equations", "quadent"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List builtin equations");

    auto* run = app.add_subcommand("run", "Evolve staircase data and analyse the degrees");
    std::string eq_name, eq_file, params = "generic", diagonal, lambda, border = "both";
    std::string verify = "sampled";
    int steps = 0, trials = 3, max_order = 8, max_transient = 4;
    std::uint64_t prime = arith::kMersenne61, seed = 0;
    bool no_timing = false, serial = false;
    Output run_out;
    auto* o_eq = run->add_option("--equation", eq_name, "Builtin equation name");
    auto* o_file = run->add_option("--equation-file", eq_file, "Equation file");
    o_eq->excludes(o_file);
    run->add_option("--params", params, "Parameter mode")
        ->check(CLI::IsMember({"generic", "integrable", "constrained"}));
    auto* o_diag = run->add_option("--diagonal", diagonal, "Fundamental diagonal: ++ +- -+ --")
                       ->check(CLI::IsMember({"++", "+-", "-+", "--"}));
    auto* o_lambda = run->add_option("--lambda", lambda, "Staircase step l1,l2");
    o_diag->excludes(o_lambda);
    run->add_option("--steps", steps, "Number of staircase steps")->required()->check(
        CLI::PositiveNumber);
    run->add_option("--trials", trials, "Independent trials")->check(CLI::PositiveNumber);
    run->add_option("--prime", prime, "Field modulus");
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--border", border, "Border sequences to report")
        ->check(CLI::IsMember({"1", "2", "both"}));
    run->add_option("--verify", verify, "Back-substitution checks")
        ->check(CLI::IsMember({"none", "sampled", "all"}));
    run->add_option("--max-order", max_order, "Largest recurrence order")->check(CLI::PositiveNumber);
    run->add_option("--max-transient", max_transient, "Largest transient")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--out", run_out.path, "Output file");
    run->add_option("--format", run_out.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    run->add_flag("--no-timing", no_timing, "Report timing_ms as 0");
    run->add_flag("--serial", serial, "Run trials sequentially");

    auto* fit = app.add_subcommand("fit", "Analyse a given sequence");
    std::string sequence;
    int fit_order = 8, fit_transient = 4;
    Output fit_out;
    fit->add_option("--sequence", sequence, "Comma separated degrees")->required();
    fit->add_option("--max-order", fit_order, "Largest recurrence order")->check(CLI::PositiveNumber);
    fit->add_option("--max-transient", fit_transient, "Largest transient")
        ->check(CLI::NonNegativeNumber);
    fit->add_option("--out", fit_out.path, "Output file");
    fit->add_option("--format", fit_out.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (list->parsed()) {
            for (const auto& b : equation::builtin_registry())
                out << std::left << std::setw(18) << b.name << b.summary << "\n";
            return 0;
        }

        if (fit->parsed()) {
            std::vector<std::int64_t> values;
            try {
                values = parse_list(sequence);
            } catch (const std::exception& e) {
                throw UsageError(std::string("--sequence: ") + e.what());
            }
            Report r;
            r.command = "fit";
            r.max_order = fit_order;
            r.max_transient = fit_transient;
            r.sequences.push_back(analyze_sequence(values, fit_order, fit_transient));
            emit(r, fit_out, out);
            const int st = status_of(r);
            if (st == 3) err << "quadent: no fit for the given sequence\n";
            return st;
        }

        if (eq_name.empty() == eq_file.empty())
            throw UsageError("run needs exactly one of --equation and --equation-file");
        if (diagonal.empty() == lambda.empty())
            throw UsageError("run needs exactly one of --diagonal and --lambda");

        const auto start = std::chrono::steady_clock::now();
        Report r;
        r.command = "run";
        r.params_mode = params;
        equation::QuadRelationSpec eq;
        if (!eq_name.empty()) {
            r.equation = equation::builtin_for_mode(eq_name, params);
            eq = equation::builtin(r.equation);
        } else {
            if (params != "generic")
                throw UsageError("--params applies to builtin equations only");
            eq = equation::parse_equation(read_file(eq_file), eq_file);
            r.equation = eq_file;
        }
        if (!diagonal.empty()) {
            r.mode = lattice::RunMode::fundamental(*equation::parse_orientation(diagonal));
        } else {
            std::vector<std::int64_t> l;
            try {
                l = parse_list(lambda);
            } catch (const std::exception& e) {
                throw UsageError(std::string("--lambda: ") + e.what());
            }
            if (l.size() != 2 || l[0] == 0 || l[1] == 0 || std::abs(l[0]) > 1000 ||
                std::abs(l[1]) > 1000)
                throw UsageError("--lambda expects two nonzero integers l1,l2");
            r.mode = lattice::RunMode::staircase(static_cast<int>(l[0]), static_cast<int>(l[1]));
        }

        std::optional<arith::PrimeField> field;
        try {
            field.emplace(prime);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--prime: ") + e.what());
        }

        lattice::RunOptions opts;
        opts.trials = trials;
        opts.base_seed = seed;
        opts.parallel = !serial;
        opts.params_mode = params;
        opts.evolve.retain_values = false;
        opts.evolve.verify = verify == "none"  ? lattice::EvolveOptions::Verify::none
                             : verify == "all" ? lattice::EvolveOptions::Verify::all
                                               : lattice::EvolveOptions::Verify::sampled;
        const lattice::RunResult res = lattice::degree_run(eq, r.mode, steps, *field, opts);

        r.steps = steps;
        r.trials = trials;
        r.prime = prime;
        r.seed = seed;
        r.max_order = max_order;
        r.max_transient = max_transient;
        r.verified_cells = res.verified_cells;
        for (const auto& seq : res.sequences) {
            const int b = seq.provenance.border;
            if (b != 0 && border != "both" && std::to_string(b) != border) continue;
            SequenceReport s = analyze_sequence(seq.values, max_order, max_transient);
            s.border = b;
            s.disagreements = seq.provenance.disagreements;
            s.seeds = seq.provenance.seeds;
            s.retries = seq.provenance.retries;
            r.sequences.push_back(std::move(s));
        }
        const auto stop = std::chrono::steady_clock::now();
        r.timing_ms =
            no_timing ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
        emit(r, run_out, out);
        const int st = status_of(r);
        if (st == 3) err << "quadent: no fit for at least one sequence\n";
        return st;
    } catch (const UsageError& e) {
        err << "quadent: " << e.what() << "\n";
        return 1;
    } catch (const equation::ParseError& e) {
        err << "quadent: " << eq_file << ": " << e.what() << "\n";
        return 1;
    } catch (const equation::ConfigError& e) {
        err << "quadent: " << e.what() << "\n";
        return 1;
    } catch (const lattice::SingularEvolution& e) {
        err << "quadent: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "quadent: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace quadent::report
