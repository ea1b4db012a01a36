// Acceptance run: one line per criterion, exit status 0 only if all pass.
//
//   acceptance [--cli PATH] [--only N]...
//
// Criteria 1-8 run the verification suites in-process; criterion 9 drives
// the CLI executable and compares its outputs across runs and job counts.

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sys/wait.h>

#include "vasslab/verify.hpp"

using namespace vasslab;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> suites;
    double limit_seconds;
};

std::string capture(const std::string& cmd, int& status)
{
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        out.append(buf.data(), n);
    int rc = pclose(p);
    status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_line(int id, bool ok, const std::string& title, double secs, const std::string& extra = {})
{
    char t[32];
    std::snprintf(t, sizeof t, "%.2f s", secs);
    std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << title << " (" << t << ")"
              << (extra.empty() ? "" : "; " + extra) << std::endl;
}

bool determinism(const std::string& cli, std::string& detail_out)
{
    if (cli.empty()) {
        detail_out = "no CLI path given";
        return false;
    }
    const std::string suites = "example1 pspace ctrl triples pairs expspace tower coefficients";
    int s1 = 0, s2 = 0, s4 = 0;
    auto a = capture(cli + " verify " + suites + " --jobs 1 2>/dev/null", s1);
    auto b = capture(cli + " verify " + suites + " --jobs 1 2>/dev/null", s2);
    auto c = capture(cli + " verify " + suites + " --jobs 4 2>/dev/null", s4);
    bool same_verify = !a.empty() && a == b && a == c && s1 == 0 && s2 == 0 && s4 == 0;

    // A frontier wide enough for the parallel path to engage.
    std::string tmp = "acceptance_det.vass";
    int rs = 0;
    capture(cli + " reduce subset-sum --param s0=7 --param values=7,7,7 --out " + tmp, rs);
    int e1 = 0, e4 = 0;
    auto x = capture(cli + " explore " + tmp + " --caps 16,8,7,100 --to '*(0,0,*,*)' --jobs 1 2>/dev/null", e1);
    auto y = capture(cli + " explore " + tmp + " --caps 16,8,7,100 --to '*(0,0,*,*)' --jobs 4 2>/dev/null", e4);
    std::remove(tmp.c_str());
    bool same_explore = rs == 0 && !x.empty() && x == y && e1 == e4;

    detail_out = "verify reports " + std::string(same_verify ? "identical" : "DIFFER") + " (" +
                 std::to_string(a.size()) + " bytes), explore reports " + (same_explore ? "identical" : "DIFFER") +
                 " (" + std::to_string(x.size()) + " bytes)";
    return same_verify && same_explore;
}

} // namespace

int main(int argc, char** argv)
{
    std::string cli;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc)
            cli = argv[++i];
        else if (a == "--only" && i + 1 < argc)
            only.insert(std::stoi(argv[++i]));
        else {
            std::cerr << "usage: acceptance [--cli PATH] [--only N]...\n";
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "Example-1 compilation: 5 states, 8 transitions, drawn structure", {"example1"}, 1},
        {2, "five-counter pump: only (8,64,0,0) reaches q_F with x5=0 (capped, exhaustive)", {"pspace"}, 300},
        {3, "subset-sum grid: reachability equals brute force, flat, dimension 4", {"subset-sum"}, 900},
        {4, "controlling counter: 200 random marker programs, zero violations", {"ctrl"}, 60},
        {5, "triple and pair translations agree with the accepting-run oracle", {"triples", "pairs"}, 600},
        {6, "six-counter pump witness ends (96,9216,0,0,0,0); 100 mutants fail", {"expspace"}, 120},
        {7, "tower witness (n=1, seed=8); 4 tests per round; seed 1 infeasible", {"tower"}, 60},
        {8, "instrumentation coefficients match the closed forms", {"coefficients"}, 60},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id))
            continue;
        bool ok = true;
        std::string extra;
        double worst = 0;
        auto t0 = std::chrono::steady_clock::now();
        for (const auto& s : c.suites) {
            auto s0 = std::chrono::steady_clock::now();
            auto r = run_suite(s);
            double dt = seconds_since(s0);
            worst = std::max(worst, dt);
            std::cerr << format_report(r);
            if (r.verdict != Verdict::pass) {
                ok = false;
                extra += s + " " + to_string(r.verdict) + " ";
            }
        }
        if (worst > c.limit_seconds) {
            ok = false;
            extra += "over the runtime limit ";
        }
        failures += !ok;
        print_line(c.id, ok, c.title, seconds_since(t0), extra);
    }
    if (only.empty() || only.count(9)) {
        auto t0 = std::chrono::steady_clock::now();
        std::string extra;
        bool ok = determinism(cli, extra);
        failures += !ok;
        print_line(9, ok, "determinism: verify and explore output identical for --jobs 1 and 4", seconds_since(t0),
                   extra);
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
