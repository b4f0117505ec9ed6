#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "padiccf/bilinear.hpp"
#include "padiccf/hensel.hpp"
#include "padiccf/io.hpp"
#include "padiccf/metrics.hpp"

using namespace padiccf;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNonTerminating = 3;
constexpr int kExitStalled = 4;

Rational parse_rational(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw InvalidInput("not a rational: '" + s + "'");
    if (q.get_den() == 0) throw InvalidInput("zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

Integer parse_integer(const std::string& s) {
    Integer n;
    if (n.set_str(s, 10) != 0) throw InvalidInput("not an integer: '" + s + "'");
    return n;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t from = 0;
    while (true) {
        size_t at = s.find(sep, from);
        if (at == std::string::npos) {
            parts.push_back(s.substr(from));
            return parts;
        }
        parts.push_back(s.substr(from, at - from));
        from = at + 1;
    }
}

std::vector<Rational> parse_coeffs(const std::string& s, size_t n, const char* what) {
    std::vector<std::string> parts = split(s, ',');
    if (parts.size() != n)
        throw InvalidInput(std::string(what) + " needs " + std::to_string(n) +
                           " comma-separated rationals, got '" + s + "'");
    std::vector<Rational> out;
    for (const std::string& part : parts) out.push_back(parse_rational(part));
    return out;
}

// Input specs: rat:NUM/DEN or surd:A,B,C,D[,branch]. The surd is
// (A + B*sqrt(D))/C; the branch picks the mod-p square root and defaults to
// the smaller residue.
CFStream parse_input_spec(const std::string& spec, const Integer& p, Algorithm algo) {
    if (spec.rfind("rat:", 0) == 0)
        return CFStream::from_rational(parse_rational(spec.substr(4)), p, algo);
    if (spec.rfind("surd:", 0) == 0) {
        std::vector<std::string> parts = split(spec.substr(5), ',');
        if (parts.size() != 4 && parts.size() != 5)
            throw InvalidInput("surd spec needs A,B,C,D[,branch], got '" + spec + "'");
        QuadraticSurd surd;
        surd.a = parse_integer(parts[0]);
        surd.b = parse_integer(parts[1]);
        surd.c = parse_integer(parts[2]);
        surd.D = parse_integer(parts[3]);
        surd.branch = parts.size() == 5 ? parse_integer(parts[4])
                                        : sqrt_branches_mod_p(surd.D, p).first;
        return CFStream::from_surd(surd, p, algo);
    }
    throw InvalidInput("input spec must start with rat: or surd:, got '" + spec + "'");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot open '" + path + "' for writing");
    return f;
}

// CSV and JSON sinks accept "-" for stdout.
void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    open_out(path) << text;
}

struct ExpandArgs {
    std::string p, algo, input, json_path;
    size_t count = 10;
    bool strict = false;
};

int cmd_expand(const ExpandArgs& a) {
    Integer p = parse_integer(a.p);
    PadicContext validate(p, DigitConvention::Ruban);
    Algorithm algo = parse_algorithm(a.algo);
    CFStream s = parse_input_spec(a.input, p, algo);
    ExpansionResult r = expand(s, a.count);

    std::string line;
    for (const Rational& t : r.terms) {
        if (!line.empty()) line += ", ";
        line += to_string(t);
    }
    std::cout << line << "\n";
    if (r.terminated)
        std::cout << "status: terminated\n";
    else if (r.nonterminating_cycle)
        std::cout << "status: nonterminating (cycle at index " << *r.nonterminating_cycle
                  << ")\n";
    else
        std::cout << "status: truncated\n";

    if (!a.json_path.empty()) write_text(a.json_path, json_of(r).dump(2) + "\n");
    return a.strict && r.nonterminating_cycle ? kExitNonTerminating : 0;
}

struct EngineArgs {
    std::string p, algo, coeffs, coeffs2, alpha, beta, trace_path;
    size_t max_inputs = 100000;
    size_t max_outputs = 1000;
};

int finish_engine_run(const EngineArgs& a, const RunTrace& trace, const Integer& p,
                      Algorithm algo) {
    for (const Rational& q : outputs_of(trace)) std::cout << to_string(q) << "\n";
    std::cerr << "status: " << name_of(trace.status) << " after " << trace.inputs_consumed
              << " inputs, " << trace.outputs_emitted << " outputs\n";
    if (!a.trace_path.empty()) write_text(a.trace_path, trace_json(trace, p, algo).dump(2) + "\n");
    bool stalled = trace.status == RunStatus::InputBudgetExhausted ||
                   trace.status == RunStatus::SwapLimitReached;
    return stalled && trace.outputs_emitted == 0 ? kExitStalled : 0;
}

int cmd_moebius(const EngineArgs& a) {
    Integer p = parse_integer(a.p);
    PadicContext validate(p, DigitConvention::Ruban);
    Algorithm algo = parse_algorithm(a.algo);
    std::vector<Rational> c = parse_coeffs(a.coeffs, 4, "--coeffs");
    Moebius f{c[0], c[1], c[2], c[3]};
    CFStream alpha = parse_input_spec(a.alpha, p, algo);
    EngineOptions opt;
    opt.max_inputs = a.max_inputs;
    opt.max_outputs = a.max_outputs;
    RunTrace trace = run_moebius(f, alpha, opt);
    return finish_engine_run(a, trace, p, algo);
}

int cmd_bilinear(const EngineArgs& a) {
    Integer p = parse_integer(a.p);
    PadicContext validate(p, DigitConvention::Ruban);
    Algorithm algo = parse_algorithm(a.algo);
    std::vector<Rational> cn = parse_coeffs(a.coeffs, 4, "--coeffs");
    std::vector<Rational> cd = parse_coeffs(a.coeffs2, 4, "--coeffs2");
    Bilinear st{cn[0], cn[1], cn[2], cn[3], cd[0], cd[1], cd[2], cd[3]};
    CFStream alpha = parse_input_spec(a.alpha, p, algo);
    CFStream beta = parse_input_spec(a.beta, p, algo);
    EngineOptions opt;
    opt.max_inputs = a.max_inputs;
    opt.max_outputs = a.max_outputs;
    RunTrace trace = run_bilinear(st, alpha, beta, opt);
    return finish_engine_run(a, trace, p, algo);
}

struct ExperimentArgs {
    std::string p, algo, csv_path;
    std::string surd_d, surd_d2, branch, branch2;
    size_t trials = 100;
    size_t outputs = 1000;
    unsigned long coeff_range = 10000;
    unsigned long seed = 1;
    size_t max_inputs = 100000;
};

Integer pick_branch(const std::string& given, const Integer& D, const Integer& p) {
    if (!given.empty()) return parse_integer(given);
    return sqrt_branches_mod_p(D, p).first;
}

int cmd_experiment_moebius(const ExperimentArgs& a) {
    Integer p = parse_integer(a.p);
    PadicContext validate(p, DigitConvention::Ruban);
    Algorithm algo = parse_algorithm(a.algo);
    Integer D = parse_integer(a.surd_d);
    Integer branch = pick_branch(a.branch, D, p);
    auto cache = std::make_shared<SurdQuotientCache>(QuadraticSurd{0, 1, 1, D, branch}, p, algo);

    std::mt19937_64 rng(a.seed);
    std::uniform_int_distribution<unsigned long> coeff(0, a.coeff_range);
    std::vector<StaircasePoint> rows;
    for (size_t trial = 0; trial < a.trials; ++trial) {
        Moebius f;
        do {
            f = {Rational(Integer(coeff(rng))), Rational(Integer(coeff(rng))),
                 Rational(Integer(coeff(rng))), Rational(Integer(coeff(rng)))};
        } while (f.determinant() == 0);
        CFStream alpha = CFStream::from_cache(cache, p, algo, branch);
        EngineOptions opt;
        opt.max_inputs = a.max_inputs;
        opt.max_outputs = a.outputs;
        RunTrace trace = run_moebius(f, alpha, opt);
        append_staircase(rows, trial, trace);
    }
    std::ostringstream os;
    write_staircase_csv(os, rows);
    write_text(a.csv_path, os.str());
    return 0;
}

int cmd_experiment_bilinear(const ExperimentArgs& a) {
    Integer p = parse_integer(a.p);
    PadicContext validate(p, DigitConvention::Ruban);
    Algorithm algo = parse_algorithm(a.algo);
    Integer D1 = parse_integer(a.surd_d);
    Integer D2 = parse_integer(a.surd_d2);
    Integer b1 = pick_branch(a.branch, D1, p);
    Integer b2 = pick_branch(a.branch2, D2, p);
    auto cache1 = std::make_shared<SurdQuotientCache>(QuadraticSurd{0, 1, 1, D1, b1}, p, algo);
    auto cache2 = std::make_shared<SurdQuotientCache>(QuadraticSurd{0, 1, 1, D2, b2}, p, algo);

    std::mt19937_64 rng(a.seed);
    std::uniform_int_distribution<unsigned long> coeff(0, a.coeff_range);
    std::vector<BilinearStaircasePoint> rows;
    for (size_t trial = 0; trial < a.trials; ++trial) {
        Bilinear st;
        auto draw = [&]() -> Rational { return Rational(Integer(coeff(rng))); };
        do {
            st = {draw(), draw(), draw(), draw(), draw(), draw(), draw(), draw()};
        } while (!rank_two(st));
        CFStream alpha = CFStream::from_cache(cache1, p, algo, b1);
        CFStream beta = CFStream::from_cache(cache2, p, algo, b2);
        EngineOptions opt;
        opt.max_inputs = a.max_inputs;
        opt.max_outputs = a.outputs;
        RunTrace trace = run_bilinear(st, alpha, beta, opt);
        append_bilinear_staircase(rows, trial, trace);
    }
    std::ostringstream os;
    write_bilinear_staircase_csv(os, rows);
    write_text(a.csv_path, os.str());
    return 0;
}

struct MetricsArgs {
    std::string p, algo, csv_path, target;
    size_t samples = 10000;
    long depth = 90;
    long kmax = 5;
    unsigned long seed = 1;
};

int cmd_metrics(const MetricsArgs& a) {
    Integer p = parse_integer(a.p);
    PadicContext validate(p, DigitConvention::Ruban);
    Algorithm algo = parse_algorithm(a.algo);
    size_t per_sample = static_cast<size_t>(a.depth / 3);

    std::vector<FrequencyReport> reports;
    if (algo != Algorithm::MR) {
        HaarSampler sampler(p, a.seed, a.depth);
        reports = valuation_histogram(algo, sampler, per_sample, a.samples, a.kmax);
    }
    if (!a.target.empty() || algo == Algorithm::MR) {
        // Defaults to 1/p, the simplest legal value for every algorithm.
        Rational y = a.target.empty() ? pow_p(p, -1) : parse_rational(a.target);
        HaarSampler sampler(p, a.seed, a.depth);
        reports.push_back(frequency_of_value(y, algo, sampler, per_sample, a.samples));
    }
    std::ostringstream os;
    write_frequency_csv(os, reports);
    write_text(a.csv_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic continued fractions: expansions, floor engines, experiments"};
    app.require_subcommand(1);
    int rc = 0;

    ExpandArgs ex;
    CLI::App* expand_cmd = app.add_subcommand("expand", "Expand one number");
    expand_cmd->add_option("--p", ex.p, "odd prime")->required();
    expand_cmd->add_option("--algo", ex.algo, "ruban|browkin1|mr")->required();
    expand_cmd->add_option("--input", ex.input, "rat:NUM/DEN or surd:A,B,C,D[,branch]")
        ->required();
    expand_cmd->add_option("--count", ex.count, "number of quotients");
    expand_cmd->add_option("--json", ex.json_path, "write the expansion as JSON to this path");
    expand_cmd->add_flag("--strict", ex.strict, "exit 3 when a nonterminating cycle is found");
    expand_cmd->callback([&] { rc = cmd_expand(ex); });

    EngineArgs mo;
    CLI::App* moebius_cmd =
        app.add_subcommand("moebius", "Stream (x*a+y)/(z*a+t) from the expansion of a");
    moebius_cmd->add_option("--p", mo.p, "odd prime")->required();
    moebius_cmd->add_option("--algo", mo.algo, "ruban|browkin1")->required();
    moebius_cmd->add_option("--coeffs", mo.coeffs, "x,y,z,t")->required();
    moebius_cmd->add_option("--alpha", mo.alpha, "input spec")->required();
    moebius_cmd->add_option("--max-inputs", mo.max_inputs, "input budget");
    moebius_cmd->add_option("--max-outputs", mo.max_outputs, "output budget");
    moebius_cmd->add_option("--trace", mo.trace_path, "write the event trace as JSON");
    moebius_cmd->callback([&] { rc = cmd_moebius(mo); });

    EngineArgs bi;
    CLI::App* bilinear_cmd = app.add_subcommand(
        "bilinear", "Stream (x*ab+y*a+z*b+t)/(e*ab+f*a+g*b+h) from two expansions");
    bilinear_cmd->add_option("--p", bi.p, "odd prime")->required();
    bilinear_cmd->add_option("--algo", bi.algo, "ruban|browkin1")->required();
    bilinear_cmd->add_option("--coeffs", bi.coeffs, "x,y,z,t")->required();
    bilinear_cmd->add_option("--coeffs2", bi.coeffs2, "e,f,g,h")->required();
    bilinear_cmd->add_option("--alpha", bi.alpha, "input spec")->required();
    bilinear_cmd->add_option("--beta", bi.beta, "input spec")->required();
    bilinear_cmd->add_option("--max-inputs", bi.max_inputs, "input budget");
    bilinear_cmd->add_option("--max-outputs", bi.max_outputs, "output budget");
    bilinear_cmd->add_option("--trace", bi.trace_path, "write the event trace as JSON");
    bilinear_cmd->callback([&] { rc = cmd_bilinear(bi); });

    CLI::App* exp_cmd = app.add_subcommand("experiment", "Reproduce the staircase figures");
    exp_cmd->require_subcommand(1);

    ExperimentArgs em;
    CLI::App* ms = exp_cmd->add_subcommand(
        "mobius-staircase", "inputs consumed per output over random transformations of a surd");
    ms->add_option("--p", em.p, "odd prime")->required();
    ms->add_option("--algo", em.algo, "ruban|browkin1")->required();
    ms->add_option("--surd", em.surd_d, "D of sqrt(D)")->required();
    ms->add_option("--branch", em.branch, "mod-p root of D (default: smaller)");
    ms->add_option("--trials", em.trials, "number of random transformations");
    ms->add_option("--outputs", em.outputs, "output budget per trial");
    ms->add_option("--coeff-range", em.coeff_range, "coefficients drawn from {0..R}");
    ms->add_option("--seed", em.seed, "PRNG seed");
    ms->add_option("--max-inputs", em.max_inputs, "input budget per trial");
    ms->add_option("--csv", em.csv_path, "output CSV path ('-' for stdout)")->required();
    ms->callback([&] { rc = cmd_experiment_moebius(em); });

    ExperimentArgs eb;
    CLI::App* bs = exp_cmd->add_subcommand(
        "bilinear-staircase", "two-variable version over a pair of surds");
    bs->add_option("--p", eb.p, "odd prime")->required();
    bs->add_option("--algo", eb.algo, "ruban|browkin1")->required();
    bs->add_option("--surd", eb.surd_d, "D of the alpha surd")->required();
    bs->add_option("--surd2", eb.surd_d2, "D of the beta surd")->required();
    bs->add_option("--branch", eb.branch, "mod-p root for alpha");
    bs->add_option("--branch2", eb.branch2, "mod-p root for beta");
    bs->add_option("--trials", eb.trials, "number of random transformations");
    bs->add_option("--outputs", eb.outputs, "output budget per trial");
    bs->add_option("--coeff-range", eb.coeff_range, "coefficients drawn from {0..R}");
    bs->add_option("--seed", eb.seed, "PRNG seed");
    bs->add_option("--max-inputs", eb.max_inputs, "input budget per trial");
    bs->add_option("--csv", eb.csv_path, "output CSV path ('-' for stdout)")->required();
    bs->callback([&] { rc = cmd_experiment_bilinear(eb); });

    MetricsArgs me;
    CLI::App* metrics_cmd =
        app.add_subcommand("metrics", "Monte-Carlo frequency laws of partial quotients");
    metrics_cmd->add_option("--p", me.p, "odd prime")->required();
    metrics_cmd->add_option("--algo", me.algo, "ruban|browkin1|mr")->required();
    metrics_cmd->add_option("--samples", me.samples, "number of samples");
    metrics_cmd->add_option("--depth", me.depth, "digits per sample");
    metrics_cmd->add_option("--kmax", me.kmax, "deepest valuation class");
    metrics_cmd->add_option("--seed", me.seed, "PRNG seed");
    metrics_cmd->add_option("--target", me.target, "extra value-frequency row for this rational");
    metrics_cmd->add_option("--csv", me.csv_path, "output CSV path ('-' for stdout)")->required();
    metrics_cmd->callback([&] { rc = cmd_metrics(me); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return rc;
}
