// Exercises the CLI's exit-code contract end to end: 0 when verdicts match
// expectations (including expected failures), 1 on mismatch, 2 on usage or
// input errors. argv[1] is the CLI binary.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

namespace {

std::string g_cli;
int g_failures = 0;

int run(const std::string& args, std::string* out = nullptr) {
    std::string cmd = g_cli + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return -1;
    std::string text;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, got);
    int rc = pclose(pipe);
    if (out) *out = text;
    return WEXITSTATUS(rc);
}

void expect(const std::string& what, bool ok) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << what << "\n";
    if (!ok) ++g_failures;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_test <latsym binary>\n";
        return 2;
    }
    g_cli = argv[1];

    expect("catalog list exits 0", run("catalog list") == 0);

    std::string out;
    run("catalog list", &out);
    expect("catalog list prints 16 ids", std::count(out.begin(), out.end(), '\n') == 16);

    expect("verify claw --entry ex1 --law P1 exits 0",
           run("verify claw --entry ex1 --law P1") == 0);
    expect("verify symmetry --entry A1d0 --char Q3 exits 0",
           run("verify symmetry --entry A1d0 --char Q3") == 0);
    expect("expected failure counts as expected (exit 0)",
           run("verify variational --entry ex4 --char V2") == 0);

    // A sign-flipped law in a user file: verdict mismatch, witness printed.
    const char* bad_path = "/tmp/latsym_cli_test_bad.claw";
    {
        std::ofstream f(bad_path);
        f << "id: bad\ndim: 1\nvars: u\ndomain u: positive\n"
             "rule u[2]: u[1]^2/u[0]\n"
             "law P1 P: u[1]/u[0] + u[0]\n"
             "expect claw P1: holds\n";
    }
    std::string bad_out;
    int bad_rc = run(std::string("verify claw --file ") + bad_path, &bad_out);
    expect("sign-flipped user law exits 1", bad_rc == 1);
    expect("failure prints a witness", bad_out.find("witness") != std::string::npos);
    std::remove(bad_path);

    expect("unknown entry exits 2", run("verify claw --entry nope") == 2);
    expect("unknown catalog action exits 2", run("catalog frobnicate") == 2);
    expect("missing inputs exit 2", run("verify claw") == 2);

    expect("noether needs a Lagrangian (exit 2 on ex2)",
           run("noether --entry ex2 --char Q1") == 2);
    expect("noether constructs and verifies on ex1",
           run("noether --entry ex1 --char V1") == 0);

    expect("simulate exits 0", run("simulate --entry ex3") == 0);

    std::string a, b;
    run("catalog run-all --seed 7 --format json", &a);
    run("catalog run-all --seed 7 --format json", &b);
    expect("JSON reports are byte-identical for equal seeds", !a.empty() && a == b);

    std::cout << (g_failures == 0 ? "all CLI contract checks passed\n"
                                  : "CLI contract checks FAILED\n");
    return g_failures == 0 ? 0 : 1;
}
