#include "causalloop/cli.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "causalloop/causal.h"
#include "causalloop/diagop_io.h"
#include "causalloop/game.h"
#include "causalloop/process.h"

namespace causalloop::cli {

namespace {

using nlohmann::json;

// Raised for bad option values that CLI11 cannot catch on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    int n = 0;
    std::optional<int> m;
    std::string inputs;
    uint64_t shots = 100000;
    uint64_t seed = 0;
    std::string format = "monomials";
    bool json = false;
    bool as_float = false;
    bool brute_force = false;
    std::string out_path;
    std::string file_path;
};

std::string num_str(const Dyadic &v, bool as_float) {
    return as_float ? float_str(v.to_double()) : v.str();
}

std::string num_str(const Rational &v, bool as_float) {
    return as_float ? float_str(v.convert_to<double>()) : rational_str(v);
}

void write_atomically(const std::string &path, const std::string &content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        f << content;
        if (!f) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot read " + path);
    }
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void require_n(int n, int min) {
    if (n < min) {
        throw UsageError("--n must be >= " + std::to_string(min) + ", got " + std::to_string(n));
    }
}

ProcessMatrix build_or_refuse(int n) {
    if (n == 2) {
        throw UsageError(
            "n = 2 is unsupported: the two-bit channel cannot be used to signal from its source to its "
            "destination, so W_n exists only for n >= 3");
    }
    require_n(n, 3);
    return build_w(n);
}

DiagOperator load_operator(const Options &o) {
    if (!o.file_path.empty()) {
        json j;
        try {
            j = json::parse(read_file(o.file_path));
        } catch (const json::parse_error &e) {
            throw UsageError(std::string("invalid JSON in ") + o.file_path + ": " + e.what());
        }
        return operator_from_json(j);
    }
    if (o.n == 0) {
        throw UsageError("one of --n or --file is required");
    }
    return build_or_refuse(o.n).op();
}

std::string render_operator(const DiagOperator &op, const std::string &format, bool as_json, bool as_float = false) {
    if (format == "dense") {
        return dense_to_csv(op);
    }
    if (as_json) {
        return operator_to_json(op).dump(2) + "\n";
    }
    DiagOperator terms = op.to_monomials();
    if (!as_float) {
        return terms.str();
    }
    std::string out = "layout " + terms.layout().str() + "\n";
    for (const auto &[mask, c] : terms.terms()) {
        out += "  " + num_str(c, true) + " * " + ZMonomial{terms.layout(), mask}.str() + "\n";
    }
    return out;
}

int cmd_build_w(const Options &o, std::ostream &out) {
    ProcessMatrix w = build_or_refuse(o.n);
    std::string body = render_operator(w.op(), o.format, o.json || !o.out_path.empty(), o.as_float);
    if (!o.out_path.empty()) {
        write_atomically(o.out_path, body);
        out << "wrote W_" << o.n << " (" << w.op().terms().size() << " terms, prefactor "
            << num_str(w.normalization(), o.as_float) << ") to " << o.out_path << "\n";
        return kExitOk;
    }
    if (!o.json && o.format == "monomials") {
        out << "W_" << o.n << ": " << w.op().terms().size() << " terms, prefactor "
            << num_str(w.normalization(), o.as_float) << "\n";
    }
    out << body;
    return kExitOk;
}

int cmd_export(const Options &o, std::ostream &out) {
    DiagOperator op = load_operator(o);
    std::string body = render_operator(op, o.format, true);
    if (!o.out_path.empty()) {
        write_atomically(o.out_path, body);
        out << "wrote " << o.format << " operator to " << o.out_path << "\n";
    } else {
        out << body;
    }
    return kExitOk;
}

int cmd_validate(const Options &o, std::ostream &out) {
    DiagOperator op = load_operator(o);
    ValidationReport report = validate_process(op);
    if (o.json) {
        out << report.to_json().dump(2) << "\n";
    } else {
        out << "nonneg " << report.nonneg << "\n"
            << "channel_norm " << report.channel_norm << "\n"
            << "bilinear_norm checked=" << report.bilinear_norm.checked
            << " failed=" << report.bilinear_norm.failed
            << (report.bilinear_norm.exhaustive ? " (exhaustive)" : " (sampled)") << "\n"
            << "term_structure " << report.term_structure << "\n"
            << "signaling\n";
        for (const auto &row : report.signaling) {
            out << " ";
            for (bool b : row) {
                out << " " << b;
            }
            out << "\n";
        }
    }
    if (!report.passed()) {
        std::string names;
        for (const auto &f : report.failures()) {
            names += (names.empty() ? "" : ", ") + f;
        }
        out << "validation failed: " << names << "\n";
        return kExitValidationFailed;
    }
    if (!o.json) {
        out << "valid\n";
    }
    return kExitOk;
}

std::vector<int> parse_inputs(const std::string &s, int n) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item != "0" && item != "1") {
            throw UsageError("--inputs must be comma-separated bits, got '" + s + "'");
        }
        out.push_back(item == "1");
    }
    if ((int)out.size() != n) {
        throw UsageError("--inputs needs " + std::to_string(n) + " bits, got " + std::to_string(out.size()));
    }
    return out;
}

int cmd_play(const Options &o, std::ostream &out) {
    ProcessMatrix w = build_or_refuse(o.n);
    if (o.m.has_value() != !o.inputs.empty()) {
        throw UsageError("--m and --inputs must be given together");
    }
    WinningStrategy strategy(o.n);
    if (!o.m) {
        GameResult result = success_probability_exact(w, strategy.as_strategy());
        if (o.json) {
            out << result.to_json(o.as_float).dump(2) << "\n";
            return kExitOk;
        }
        for (int m = 0; m < o.n; m++) {
            out << "m=" << m << " success " << num_str(result.per_m[m], o.as_float);
            if (o.n % 2 == 0) {
                out << " (wide channel: " << wide_code_name(strategy.code(m)) << ")";
            }
            out << "\n";
        }
        out << "p_succ " << num_str(result.p_succ, o.as_float) << "\n";
        return kExitOk;
    }
    if (*o.m < 0 || *o.m >= o.n) {
        throw UsageError("--m must be in [0, n)");
    }
    GameRound round{o.n, *o.m, parse_inputs(o.inputs, o.n)};
    std::vector<LocalBehavior> behaviors;
    for (int k = 0; k < o.n; k++) {
        behaviors.push_back(strategy.behavior(round.m, k, round.a[k]));
    }
    OutcomeDistribution dist = outcome_distribution(w, behaviors);
    if (o.json) {
        out << distribution_to_json(round, dist, o.as_float).dump(2) << "\n";
        return kExitOk;
    }
    for (uint64_t index = 0; index < dist.probs.size(); index++) {
        if (dist.probs[index].is_zero()) {
            continue;
        }
        out << "x=";
        for (int k = 0; k < o.n; k++) {
            out << ((index >> (o.n - 1 - k)) & 1);
        }
        out << " p=" << num_str(dist.probs[index], o.as_float) << "\n";
    }
    auto marginal = dist.marginal(round.m);
    out << "P(X_" << round.m << " = " << round.target() << ") = " << num_str(marginal[round.target()], o.as_float)
        << "\n";
    return kExitOk;
}

int cmd_sample(const Options &o, std::ostream &out) {
    build_or_refuse(o.n);
    if (o.shots < 1) {
        throw UsageError("--shots must be >= 1");
    }
    SampleResult result = sample_game(o.n, o.shots, o.seed);
    if (o.json) {
        out << result.to_json().dump(2) << "\n";
        return kExitOk;
    }
    out << "n " << result.n << "\nshots " << result.shots << "\nseed " << result.seed << "\nwins " << result.wins
        << "\nestimate " << float_str(result.estimate()) << "\nrng " << kSamplerRng << " (" << result.workers
        << " workers)\n";
    for (int m = 0; m < o.n; m++) {
        out << "m=" << m << " wins " << result.wins_per_m[m] << "/" << result.rounds_per_m[m] << "\n";
    }
    return kExitOk;
}

int cmd_causal_bound(const Options &o, std::ostream &out) {
    require_n(o.n, 2);
    Rational bound = causal_bound(o.n);
    std::optional<CausalValue> brute;
    if (o.brute_force) {
        if (o.n > 3) {
            throw UsageError("--brute-force supports n <= 3 only");
        }
        brute = brute_force_causal(o.n);
    }
    if (o.json) {
        json j;
        if (brute) {
            j = causal_report(*brute);
            j["match"] = brute->value == bound;
        } else {
            j = causal_report(forwarding_strategy_success(o.n));
        }
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    out << "model " << kCausalModel << "\n";
    out << "bound " << num_str(bound, o.as_float) << "\n";
    if (brute) {
        out << "brute-force " << num_str(brute->value, o.as_float) << "\n";
        out << "match " << (brute->value == bound ? "true" : "false") << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Exact simulator for classical process matrices and the n-party parity game", "causalloop"};
    app.require_subcommand(1);
    Options o;

    auto add_n = [&](CLI::App *sub, bool required) {
        auto *opt = sub->add_option("--n", o.n, "number of parties");
        if (required) {
            opt->required();
        }
    };
    auto add_format = [&](CLI::App *sub) {
        sub->add_option("--format", o.format, "operator format")->check(CLI::IsMember({"monomials", "dense"}));
    };

    auto *build = app.add_subcommand("build-w", "construct W_n");
    add_n(build, true);
    add_format(build);
    build->add_flag("--json", o.json, "emit the JSON operator schema");
    build->add_flag("--float", o.as_float, "print decimals instead of exact values");
    build->add_option("--out", o.out_path, "write the operator to PATH");

    auto *validate = app.add_subcommand("validate", "check a process matrix");
    add_n(validate, false);
    validate->add_option("--file", o.file_path, "operator JSON file");
    validate->add_flag("--json", o.json, "emit the JSON report");

    auto *play = app.add_subcommand("play", "exact game evaluation with the winning strategy");
    add_n(play, true);
    play->add_option("--m", o.m, "value of M");
    play->add_option("--inputs", o.inputs, "comma-separated input bits a_0..a_{n-1}");
    play->add_flag("--json", o.json, "emit JSON");
    play->add_flag("--float", o.as_float, "print decimals instead of exact values");

    auto *sample = app.add_subcommand("sample", "Monte-Carlo game play on the loop mixture");
    add_n(sample, true);
    sample->add_option("--shots", o.shots, "number of rounds");
    sample->add_option("--seed", o.seed, "RNG seed");
    sample->add_flag("--json", o.json, "emit JSON");

    auto *causal = app.add_subcommand("causal-bound", "predefined-causal-order bound");
    add_n(causal, true);
    causal->add_flag("--brute-force", o.brute_force, "also enumerate all protocols (n <= 3)");
    causal->add_flag("--json", o.json, "emit JSON");
    causal->add_flag("--float", o.as_float, "print decimals instead of exact values");

    auto *exp = app.add_subcommand("export", "write an operator in a chosen format");
    add_n(exp, false);
    exp->add_option("--file", o.file_path, "operator JSON file");
    add_format(exp);
    exp->add_option("--out", o.out_path, "output PATH (stdout if omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (build->parsed()) {
            return cmd_build_w(o, out);
        }
        if (validate->parsed()) {
            return cmd_validate(o, out);
        }
        if (play->parsed()) {
            return cmd_play(o, out);
        }
        if (sample->parsed()) {
            return cmd_sample(o, out);
        }
        if (causal->parsed()) {
            return cmd_causal_bound(o, out);
        }
        return cmd_export(o, out);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::length_error &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace causalloop::cli
