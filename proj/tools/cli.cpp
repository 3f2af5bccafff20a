#include "cli.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freshfinger/harness.hpp"
#include "freshfinger/sequences.hpp"

namespace freshfinger {

namespace {

enum Exit { ok = 0, usage = 1, invariant = 2, io = 3 };

struct GenArgs {
    std::string kind;
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t K = 0;
    std::int64_t r = 0;
    std::uint64_t seed = 0;
    std::string out;
};

struct RunArgs {
    std::string structure;
    std::string seq;
    std::string trace;
    std::string summary;
    std::int64_t audit_every = 1;
};

int do_gen(const GenArgs& a, std::ostream& err) {
    const auto kind = parse_sequence_kind(a.kind);
    if (!kind || *kind == SequenceKind::file) {
        err << "gen: unknown kind '" << a.kind << "'\n";
        return usage;
    }
    SequenceSpec spec{*kind, a.n, a.m, a.K, a.r, a.seed};
    for (const std::string& w : validate(spec)) err << "warning: " << w << '\n';
    write_text(a.out, format_sequence(spec.n, generate(spec), spec));
    return ok;
}

int do_run(const RunArgs& a, std::ostream& out) {
    const auto structure = parse_structure_kind(a.structure);
    if (!structure) throw UsageError("run: unknown structure '" + a.structure + "'");
    const SequenceFile file = parse_sequence(read_text(a.seq));
    RunConfig config;
    config.structure = *structure;
    config.audit_every = a.audit_every;
    const RunResult result = replay(config, file.n, file.keys, file.spec);
    write_text(a.trace, format_trace(result.rows));
    write_text(a.summary, summary_to_json(result.summary).dump(2) + "\n");
    out << to_string(*structure) << ": " << result.summary.accesses << " accesses, average "
        << result.summary.average_cmp() << " comparisons\n";
    return ok;
}

int do_audit(const std::string& trace, std::ostream& out) {
    const std::vector<TraceRow> rows = parse_trace(read_text(trace));
    const FitReport fit = fit_rows(rows);
    nlohmann::json j = {{"c1", nullptr}, {"c2", fit.c2}, {"max_ratio", fit.max_ratio}, {"rows", fit.rows}};
    if (fit.c1) j["c1"] = *fit.c1;
    out << j.dump(2) << '\n';
    return ok;
}

int do_compare(const std::vector<std::string>& paths, std::ostream& out) {
    std::vector<nlohmann::json> summaries;
    for (const std::string& p : paths) {
        try {
            summaries.push_back(nlohmann::json::parse(read_text(p)));
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(p + ": " + e.what());
        }
    }
    const std::vector<CompareRow> rows = compare_summaries(summaries);
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %14s %10s\n", "structure", "avg_cmp", "ratio");
    out << line;
    for (const CompareRow& r : rows) {
        std::snprintf(line, sizeof line, "%-10s %14.6f %10.4f\n", r.structure.c_str(), r.average, r.ratio);
        out << line;
    }
    return ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"fresh-finger dictionary experiments"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "write an access sequence file");
    gen_cmd->add_option("--kind", gen.kind, "interleaved|strided|warmup-uniform|uniform|round-robin")->required();
    gen_cmd->add_option("--n", gen.n, "key universe size")->required();
    gen_cmd->add_option("--m", gen.m, "sequence length")->required();
    gen_cmd->add_option("--K", gen.K, "stride (strided)");
    gen_cmd->add_option("--r", gen.r, "working-set size (warmup-uniform)");
    gen_cmd->add_option("--seed", gen.seed, "PRNG seed")->required();
    gen_cmd->add_option("--out", gen.out, "output file")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "replay a sequence through a structure");
    run_cmd->add_option("--structure", run.structure, "ff|ff-p1|ff-p3|bst|splay")->required();
    run_cmd->add_option("--seq", run.seq, "sequence file")->required();
    run_cmd->add_option("--trace", run.trace, "trace CSV output")->required();
    run_cmd->add_option("--summary", run.summary, "summary JSON output")->required();
    run_cmd->add_option("--audit-every", run.audit_every, "oracle sampling stride")->required();

    std::string trace;
    auto* audit_cmd = app.add_subcommand("audit", "fit cost against the bound in a trace");
    audit_cmd->add_option("--trace", trace, "trace CSV")->required();

    std::vector<std::string> summaries;
    auto* compare_cmd = app.add_subcommand("compare", "compare summaries over one sequence");
    compare_cmd->add_option("summaries", summaries, "summary JSON files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (*gen_cmd) return do_gen(gen, err);
        if (*run_cmd) return do_run(run, out);
        if (*audit_cmd) return do_audit(trace, out);
        if (*compare_cmd) return do_compare(summaries, out);
    } catch (const InvariantError& e) {
        err << e.what() << '\n';
        return invariant;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return io;
    } catch (const std::ios_base::failure& e) {
        err << "I/O error: " << e.what() << '\n';
        return io;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}

}  // namespace freshfinger
