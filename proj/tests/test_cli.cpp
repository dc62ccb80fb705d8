#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

std::string cli_path() {
    const char* p = std::getenv("PIRANHA_CLI");
    REQUIRE_MESSAGE(p != nullptr, "PIRANHA_CLI must point at the built binary");
    return p;
}

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("piranha_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string value_of(const std::string& out, const std::string& key) {
    std::stringstream ss(out);
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    return {};
}

} // namespace

TEST_CASE("train: missing --data is a usage error") {
    RunResult r = run("train --n 4 --gamma 0.5 --K 3 --T 10");
    CHECK(r.code == 2);
}

TEST_CASE("train: gamma zero is rejected with the degeneracy diagnostic") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.02 --L 80 --m 1 --out " + dir.file("s.csv"));
    RunResult r = run("train --data " + dir.file("s.csv") +
                      " --n 4 --gamma 0 --K 3 --T 10 --out " + dir.file("run"));
    CHECK(r.code == 2);
    CHECK(r.out.find("gamma") != std::string::npos);
}

TEST_CASE("train: full sine run writes artifacts and a non-increasing trace") {
    TempDir dir;
    RunResult gen = run("gen-data --kind sine --freq 0.04 --L 80 --m 1 --out " + dir.file("s.csv"));
    REQUIRE(gen.code == 0);

    RunResult r = run("train --data " + dir.file("s.csv") +
                      " --n 6 --gamma 0.6 --K 5 --T 40 --alpha 1.0 --max-iter 60 --seed 4"
                      " --backtrack --out " + dir.file("run"));
    REQUIRE_MESSAGE(r.code == 0, r.out);
    CHECK(fs::exists(dir.file("run") + "/weights.txt"));
    CHECK(fs::exists(dir.file("run") + "/trace.csv"));
    CHECK(fs::exists(dir.file("run") + "/config.json"));
    CHECK(!value_of(r.out, "final_objective").empty());
    CHECK(!value_of(r.out, "termination").empty());

    std::ifstream trace(dir.file("run") + "/trace.csv");
    std::string line;
    std::getline(trace, line);  // header
    double prev = 0.0, prev_alpha = 1.0;
    bool first = true;
    while (std::getline(trace, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        REQUIRE(vals.size() == 6);
        if (!first && prev_alpha > 0.0) CHECK(vals[1] < prev);
        prev = vals[1];
        prev_alpha = vals[3];
        first = false;
    }
}

TEST_CASE("train: eps0 derives the horizon; explicit K wins over eps0") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.02 --L 120 --m 1 --out " + dir.file("s.csv"));
    RunResult derived = run("train --data " + dir.file("s.csv") +
                            " --n 4 --gamma 0.5 --eps0 50 --T 20 --max-iter 3 --out " +
                            dir.file("r1"));
    REQUIRE_MESSAGE(derived.code == 0, derived.out);
    CHECK(derived.out.find("derived K=") != std::string::npos);

    RunResult both = run("train --data " + dir.file("s.csv") +
                         " --n 4 --gamma 0.5 --K 2 --eps0 50 --T 20 --max-iter 3 --out " +
                         dir.file("r2"));
    REQUIRE_MESSAGE(both.code == 0, both.out);
    CHECK(both.out.find("explicit K=2 wins") != std::string::npos);
}

TEST_CASE("train: smooth state update parses and runs; malformed value exits 2") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.03 --L 60 --m 1 --out " + dir.file("s.csv"));
    RunResult ok = run("train --data " + dir.file("s.csv") +
                       " --n 4 --gamma 0.5 --K 3 --T 20 --max-iter 5 --state-update smooth:2"
                       " --out " + dir.file("run"));
    CHECK_MESSAGE(ok.code == 0, ok.out);
    RunResult bad = run("train --data " + dir.file("s.csv") +
                        " --n 4 --gamma 0.5 --K 3 --T 20 --max-iter 5 --state-update bogus"
                        " --out " + dir.file("run2"));
    CHECK(bad.code == 2);
}

TEST_CASE("train: unreadable data file exits 3") {
    TempDir dir;
    RunResult r = run("train --data " + dir.file("nope.csv") +
                      " --n 4 --gamma 0.5 --K 3 --T 10 --out " + dir.file("run"));
    CHECK(r.code == 3);
}

TEST_CASE("replay: zero weights report the target energy of the free-run window") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.05 --L 30 --m 1 --out " + dir.file("s.csv"));
    // hand-written zero weights, n=3 m=1
    std::ofstream w(dir.file("w.txt"));
    w << "piranha-weights v1 3 1\n0 0 0\n0 0 0\n0 0 0\n0 0\n0 0\n0 0\n";
    w.close();

    RunResult r = run("replay --weights " + dir.file("w.txt") + " --data " + dir.file("s.csv") +
                      " --t-switch 10 --T 20 --out " + dir.file("replay.csv"));
    REQUIRE_MESSAGE(r.code == 0, r.out);

    // recompute the expected energy from the generated sine (normalized domain)
    std::ifstream s(dir.file("s.csv"));
    std::string line;
    std::vector<double> xs;
    while (std::getline(s, line)) xs.push_back(std::stod(line));
    double lo = xs[0], hi = xs[0];
    for (double v : xs) { lo = std::min(lo, v); hi = std::max(hi, v); }
    const double scale = (hi - lo) / 2.0, offset = (hi + lo) / 2.0;
    double expect = 0.0;
    for (int t = 10; t <= 20; ++t) {
        const double norm = (xs[static_cast<std::size_t>(t)] - offset) / scale;
        expect += norm * norm;
    }
    const double got = std::stod(value_of(r.out, "replay_error"));
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
    CHECK(fs::exists(dir.file("replay.csv")));
}

TEST_CASE("replay: t-switch out of range exits 2") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.05 --L 30 --m 1 --out " + dir.file("s.csv"));
    std::ofstream w(dir.file("w.txt"));
    w << "piranha-weights v1 2 1\n0 0\n0 0\n0 0\n0 0\n";
    w.close();
    RunResult r = run("replay --weights " + dir.file("w.txt") + " --data " + dir.file("s.csv") +
                      " --t-switch 25 --T 20");
    CHECK(r.code == 2);
}

TEST_CASE("replay: non-finite weights exit 4") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.05 --L 30 --m 1 --out " + dir.file("s.csv"));
    std::ofstream w(dir.file("w.txt"));
    w << "piranha-weights v1 2 1\nnan 0\n0 0\n0 0\n0 0\n";
    w.close();
    RunResult r = run("replay --weights " + dir.file("w.txt") + " --data " + dir.file("s.csv") +
                      " --t-switch 5 --T 20");
    CHECK(r.code == 4);
}

TEST_CASE("gradcheck: default instance passes, absurd h fails") {
    RunResult ok = run("gradcheck --n 4 --m 1 --T 8 --K 5 --gamma 0.5 --seed 2");
    CHECK_MESSAGE(ok.code == 0, ok.out);
    CHECK(!value_of(ok.out, "max_rel_err").empty());

    RunResult bad = run("gradcheck --n 4 --m 1 --T 8 --K 5 --gamma 0.5 --seed 2 --h 10");
    CHECK(bad.code == 1);
}

TEST_CASE("gradcheck: assumption warning at gamma close to 1, check still runs") {
    RunResult r = run("gradcheck --n 6 --m 2 --T 8 --K 4 --gamma 0.99 --seed 3");
    CHECK(r.out.find("warning") != std::string::npos);
    CHECK((r.code == 0 || r.code == 1));  // the check itself still ran to a verdict
}

TEST_CASE("bound: prints the report fields") {
    RunResult r = run("bound --eps0 1.0 --gamma 0.25 --T 1 --n 2 --m 1");
    REQUIRE(r.code == 0);
    CHECK(value_of(r.out, "K") == "3");
    CHECK(std::stod(value_of(r.out, "C0")) == doctest::Approx(2.0));
    CHECK(std::stod(value_of(r.out, "C1")) == doctest::Approx(std::sqrt(8.0) * 2.0));
}

TEST_CASE("compare: writes both traces and the replay summary; reruns are identical") {
    TempDir dir;
    run("gen-data --kind sine --freq 0.04 --L 70 --m 1 --out " + dir.file("s.csv"));
    const std::string flags = "compare --data " + dir.file("s.csv") +
                              " --n 5 --gamma 0.6 --K 4 --T 30 --alpha 1.0 --max-iter 25"
                              " --seed 11 --backtrack --out ";
    RunResult a = run(flags + dir.file("runA"));
    REQUIRE_MESSAGE(a.code == 0, a.out);
    RunResult b = run(flags + dir.file("runB"));
    REQUIRE(b.code == 0);

    for (const char* f : {"trace_piranha.csv", "trace_baseline.csv", "summary.txt",
                          "weights_piranha.txt", "weights_baseline.txt"}) {
        CHECK(fs::exists(dir.file("runA") + "/" + f));
    }
    CHECK(!value_of(a.out, "replay_error_piranha").empty());
    CHECK(!value_of(a.out, "replay_error_baseline").empty());

    // determinism: identical flags give identical weight files
    for (const char* f : {"weights_piranha.txt", "weights_baseline.txt"}) {
        std::ifstream fa(dir.file("runA") + "/" + f), fb(dir.file("runB") + "/" + f);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("gen-data: sum of sines and square kinds work; bad kind exits 2") {
    TempDir dir;
    RunResult sos = run("gen-data --kind sum-of-sines --components 0.02:0:1,0.05:1:0.5 --L 50"
                        " --m 1 --out " + dir.file("sos.csv"));
    CHECK(sos.code == 0);
    RunResult sq = run("gen-data --kind square --freq 0.1 --L 50 --m 1 --out " + dir.file("sq.csv"));
    CHECK(sq.code == 0);
    RunResult bad = run("gen-data --kind sawtooth --L 50 --m 1 --out " + dir.file("x.csv"));
    CHECK(bad.code == 2);
}

TEST_CASE("no subcommand is a usage error") {
    RunResult r = run("");
    CHECK(r.code == 2);
}
