// vasslab: compile counter programs, generate reductions, explore and
// validate runs, and run the acceptance suites.
//
// Exit codes: 0 ok / reachable, 1 no / unreachable / contract violated,
// 2 usage or internal error, 3 inconclusive (node budget exhausted).

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vasslab/verify.hpp"

using namespace vasslab;

namespace {

constexpr int exit_ok = 0, exit_no = 1, exit_usage = 2, exit_inconclusive = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw UsageError("cannot write '" + path + "'");
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

Counter to_counter(const std::string& s)
{
    auto v = detail::parse_int(s);
    if (!v)
        throw UsageError("'" + s + "' is not an integer");
    return *v;
}

std::map<std::string, std::string> split_params(const std::vector<std::string>& raw)
{
    std::map<std::string, std::string> out;
    for (const auto& p : raw) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--param expects k=v, got '" + p + "'");
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

std::vector<Counter> to_list(const std::string& s)
{
    std::vector<Counter> out;
    if (s.empty())
        return out;
    for (auto part : detail::split(s, ','))
        out.push_back(to_counter(std::string(detail::trim(part))));
    return out;
}

struct Options {
    std::vector<std::string> params;
    std::optional<Counter> s, n, seed, bound;
    std::string caps, out, format = "text", from, to;
    std::size_t budget = 10'000'000;
    unsigned jobs = 1;
    bool all_hits = false;
};

void emit_vass(std::ostream& out, const Vass& v, const std::string& format, const Manifest& m = {})
{
    if (format == "dot") {
        write_dot(out, v);
        return;
    }
    write_manifest(out, m);
    write_vass(out, v);
}

Construction build_construction(const std::string& kind, const std::vector<std::string>& files, const Options& o)
{
    auto p = split_params(o.params);
    auto get = [&](const std::string& k, std::optional<Counter> flag, std::optional<Counter> fallback) -> Counter {
        if (flag)
            return *flag;
        if (p.contains(k))
            return to_counter(p[k]);
        if (fallback)
            return *fallback;
        throw UsageError("missing parameter '" + k + "'");
    };
    if (kind == "subset-sum") {
        if (!p.contains("values"))
            throw UsageError("subset-sum needs --param values=v1,v2,...");
        return subset_sum_to_vass({get("s0", std::nullopt, std::nullopt), to_list(p["values"])});
    }
    if (kind == "pspace")
        return pspace_pump({get("s", o.s, 1), get("n", o.n, 1)});
    if (kind == "expspace")
        return expspace_pump({get("s", o.s, 1), get("n", o.n, 1)});
    if (kind == "tower")
        return tower_pump({get("n", o.n, 1), get("seed", o.seed, 8)});
    if (kind == "amplifier")
        return amplifier();
    if (kind == "ca-triple" || kind == "ca-pair") {
        if (files.size() != 1)
            throw UsageError(kind + " needs one counter-automaton file");
        auto a = read_counter_automaton(slurp(files[0]));
        Counter B = get("B", o.bound, std::nullopt);
        if (kind == "ca-pair")
            return ca_to_vass_pair(a, B);
        return ca_to_vass_triple(a, B, get("C", std::nullopt, std::nullopt));
    }
    throw UsageError("unknown construction '" + kind + "'");
}

Caps make_caps(const Options& o, std::size_t d)
{
    Caps caps;
    caps.node_budget = o.budget;
    if (o.caps.empty())
        throw UsageError("exploration needs --caps (one value per counter, or a single sum bound 'sum=N')");
    if (o.caps.starts_with("sum=")) {
        caps.sum = to_counter(o.caps.substr(4));
    } else {
        auto v = to_list(o.caps);
        if (v.size() == 1)
            v.assign(d, v[0]);
        if (v.size() != d)
            throw UsageError("--caps needs " + std::to_string(d) + " values");
        caps.per_counter = v;
    }
    return caps;
}

/// A VASS file may carry a manifest; its source and target are the
/// defaults for --from and --to.
struct LoadedVass {
    Vass v;
    Manifest m;
};

LoadedVass load_vass(const std::string& path)
{
    auto text = slurp(path);
    return {read_vass(text), read_manifest(text)};
}

Configuration source_of(const LoadedVass& lv, const Options& o)
{
    std::string from = o.from.empty() ? manifest_get(lv.m, "source") : o.from;
    if (from.empty()) {
        if (!lv.v.initial())
            throw UsageError("no --from given and the VASS has no initial state");
        return Configuration{*lv.v.initial(), lv.v.zero()};
    }
    return parse_config(lv.v, from);
}

std::optional<ConfigPattern> target_of(const LoadedVass& lv, const Options& o)
{
    std::string to = o.to.empty() ? manifest_get(lv.m, "target") : o.to;
    if (to.empty())
        return std::nullopt;
    return parse_pattern(lv.v, to);
}

int cmd_compile(const std::string& file, const Options& o)
{
    Env env;
    for (const auto& [k, v] : split_params(o.params))
        env[k] = to_counter(v);
    auto prog = parse(slurp(file));
    auto cp = eliminate_markers(expand(prog, env));
    auto compiled = compile(cp);
    Output out(o.out);
    emit_vass(out.get(), compiled.vass, o.format, {{"program", prog.name}});
    return exit_ok;
}

int cmd_reduce(const std::string& kind, const std::vector<std::string>& files, const Options& o)
{
    auto c = build_construction(kind, files, o);
    Output out(o.out);
    emit_vass(out.get(), c.vass(), o.format, c.manifest());
    return exit_ok;
}

int cmd_explore(const std::string& file, const Options& o)
{
    auto lv = load_vass(file);
    auto src = source_of(lv, o);
    ExploreOptions eo;
    eo.target = target_of(lv, o);
    eo.jobs = o.jobs;
    eo.witnesses = true;
    auto rep = explore(lv.v, src, make_caps(o, lv.v.dimension()), eo);
    Output out(o.out);
    auto& os = out.get();
    os << "explored " << rep.explored << '\n';
    os << "exhausted " << (rep.exhausted ? "yes" : "no") << '\n';
    os << "hits " << rep.hits.size() << '\n';
    if (eo.target || o.all_hits) {
        for (std::size_t i = 0; i < rep.hits.size(); ++i) {
            os << "hit " << format_config(lv.v, rep.hits[i]) << '\n';
            if (i == 0 && eo.target)
                write_run(os, lv.v, RunFile{{}, {}, rep.witnesses[0], rep.hits[0]});
        }
    }
    if (!rep.exhausted)
        return exit_inconclusive;
    return !eo.target || !rep.hits.empty() ? exit_ok : exit_no;
}

int cmd_witness(const std::string& id, const Options& o)
{
    std::map<std::string, Counter> params;
    for (const auto& [k, v] : split_params(o.params))
        params[k] = to_counter(v);
    if (o.s)
        params["s"] = *o.s;
    if (o.n)
        params["n"] = *o.n;
    if (o.seed)
        params["seed"] = *o.seed;
    if (o.bound)
        params["B"] = *o.bound;
    try {
        auto w = canonical_witness(id, params);
        Output out(o.out);
        write_run(out.get(), w.construction.vass(), w.certificate.to_run_file());
        if (!o.out.empty()) {
            std::ofstream vf(o.out + ".vass", std::ios::binary);
            emit_vass(vf, w.construction.vass(), "text", w.construction.manifest());
        }
        return exit_ok;
    } catch (const InfeasibleParams& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return exit_no;
    }
}

int cmd_validate(const std::string& vass_file, const std::string& run_file, const Options& o)
{
    auto lv = load_vass(vass_file);
    auto rf = read_run(lv.v, slurp(run_file));
    Output out(o.out);
    auto& os = out.get();
    RunResult r;
    try {
        r = validate_run(lv.v, rf.run);
    } catch (const RunError& e) {
        os << "invalid " << e.what() << '\n';
        return exit_no;
    }
    os << "steps " << rf.run.steps.size() << '\n';
    os << "final " << format_config(lv.v, r.final) << '\n';
    if (rf.endpoint && *rf.endpoint != r.final) {
        os << "endpoint mismatch: asserted " << format_config(lv.v, *rf.endpoint) << '\n';
        return exit_no;
    }
    if (auto trg = target_of(lv, o); trg && !trg->matches(r.final)) {
        os << "contract violated: target " << (o.to.empty() ? manifest_get(lv.m, "target") : o.to) << '\n';
        return exit_no;
    }
    os << "valid\n";
    return exit_ok;
}

int cmd_verify(const std::vector<std::string>& names, const Options& o)
{
    std::vector<std::string> run = names;
    if (run.empty() || (run.size() == 1 && run[0] == "all")) {
        run.clear();
        for (const auto& [n, fn] : suites())
            run.push_back(n);
    }
    Output out(o.out);
    int code = exit_ok;
    for (const auto& name : run) {
        auto t0 = std::chrono::steady_clock::now();
        SuiteResult r;
        try {
            r = run_suite(name, VerifyOptions{o.jobs});
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.get() << format_report(r);
        out.get().flush();
        std::cerr << name << " took " << dt << " s\n";
        if (r.verdict == Verdict::fail)
            code = exit_no;
        else if (r.verdict == Verdict::inconclusive && code == exit_ok)
            code = exit_inconclusive;
    }
    return code;
}

int cmd_export_dot(const std::string& file, const Options& o)
{
    auto lv = load_vass(file);
    Output out(o.out);
    write_dot(out.get(), lv.v);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"vasslab: VASS constructions, exploration and witnesses"};
    app.require_subcommand(1, 1);
    Options o;
    std::vector<std::string> positional;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--param", o.params, "parameter k=v (repeatable)");
        sc->add_option("--out", o.out, "write output to FILE");
    };
    auto explore_flags = [&](CLI::App* sc) {
        sc->add_option("--caps", o.caps, "per-counter caps a,b,c (one value applies to all) or sum=N");
        sc->add_option("--budget", o.budget, "node budget")->check(CLI::PositiveNumber);
        sc->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sc->add_option("--from", o.from, "source configuration, e.g. q0(1,0)");
        sc->add_option("--to", o.to, "target pattern, e.g. q1(*,0)");
    };
    auto param_flags = [&](CLI::App* sc) {
        sc->add_option("--s", o.s, "construction parameter s");
        sc->add_option("--n", o.n, "construction parameter n");
        sc->add_option("--seed", o.seed, "tower seed");
        sc->add_option("--bound", o.bound, "bound B");
    };

    auto* compile_cmd = app.add_subcommand("compile", "compile a counter program to a VASS");
    compile_cmd->add_option("program", positional, "program file")->required()->expected(1);
    compile_cmd->add_option("--format", o.format)->check(CLI::IsMember({"text", "dot"}));
    common(compile_cmd);

    auto* reduce_cmd = app.add_subcommand("reduce", "generate a construction with its manifest");
    reduce_cmd->add_option("construction", positional,
                           "subset-sum|pspace|expspace|tower|amplifier|ca-triple|ca-pair [automaton file]")
        ->required()
        ->expected(1, 2);
    reduce_cmd->add_option("--format", o.format)->check(CLI::IsMember({"text", "dot"}));
    common(reduce_cmd);
    param_flags(reduce_cmd);

    auto* explore_cmd = app.add_subcommand("explore", "capped breadth-first exploration");
    explore_cmd->add_option("vass", positional, "VASS file")->required()->expected(1);
    explore_cmd->add_flag("--all", o.all_hits, "list every reached configuration when no target is given");
    common(explore_cmd);
    explore_flags(explore_cmd);

    auto* witness_cmd = app.add_subcommand("witness", "build the canonical witness of a construction");
    witness_cmd->add_option("construction", positional, "pspace|expspace|tower|amplifier")->required()->expected(1);
    common(witness_cmd);
    param_flags(witness_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "replay a run file against a VASS");
    validate_cmd->add_option("files", positional, "VASS file and run file")->required()->expected(2);
    validate_cmd->add_option("--to", o.to, "target pattern (defaults to the manifest target)");
    common(validate_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "run acceptance suites");
    verify_cmd->add_option("suites", positional, "suite names or 'all'");
    verify_cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    common(verify_cmd);

    auto* dot_cmd = app.add_subcommand("export-dot", "write a VASS as DOT");
    dot_cmd->add_option("vass", positional, "VASS file")->required()->expected(1);
    common(dot_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (compile_cmd->parsed())
            return cmd_compile(positional[0], o);
        if (reduce_cmd->parsed())
            return cmd_reduce(positional[0], {positional.begin() + 1, positional.end()}, o);
        if (explore_cmd->parsed())
            return cmd_explore(positional[0], o);
        if (witness_cmd->parsed())
            return cmd_witness(positional[0], o);
        if (validate_cmd->parsed())
            return cmd_validate(positional[0], positional[1], o);
        if (verify_cmd->parsed())
            return cmd_verify(positional, o);
        if (dot_cmd->parsed())
            return cmd_export_dot(positional[0], o);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
