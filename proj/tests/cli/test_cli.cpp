// End-to-end tests that drive the qemfit binary (path in $QEMFIT) through
// a shell, checking exit statuses, output, and the JSON round-trip.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
    int status;
    std::string out;
};

std::string qemfit_path() {
    const char* p = std::getenv("QEMFIT");
    REQUIRE_MESSAGE(p != nullptr, "QEMFIT environment variable not set");
    return p;
}

RunResult run(const std::string& args) {
    const std::string cmd = qemfit_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        out.append(buf.data(), n);
    const int rc = pclose(pipe);
    return {WEXITSTATUS(rc), out};
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path() / "qemfit_cli_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << content;
    return path;
}

const std::string kLeukemiaCsv =
    "6,6\n6,6\n6,6\n6,inf\n7,7\n9,inf\n10,10\n10,inf\n11,inf\n13,13\n16,16\n17,inf\n"
    "19,inf\n20,inf\n22,22\n23,23\n25,inf\n32,inf\n32,inf\n34,inf\n35,inf\n";

const std::string kGuptaCsv =
    "1.613,1.613\n1.644,1.644\n1.663,1.663\n1.732,1.732\n1.740,1.740\n1.763,1.763\n"
    "1.778,1.778\n1.778,inf\n1.778,inf\n1.778,inf\n";

const std::string kCracksCsv =
    "lower,upper,count\n"
    "0,6.12,5\n6.12,19.92,16\n19.92,29.64,12\n29.64,35.40,18\n35.40,39.72,18\n"
    "39.72,45.24,2\n45.24,52.32,6\n52.32,63.48,17\n63.48,inf,73\n";

double near(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE_MESSAGE(pos != std::string::npos, "missing '" << key << "' in:\n" << text);
    return std::stod(text.substr(pos + key.size()));
}

} // namespace

TEST_CASE("fit: exponential on interval data") {
    const auto data = write_temp("leukemia.csv", kLeukemiaCsv);
    const auto r = run("fit --model exponential --data " + data.string() +
                       " --strategy em --eps 1e-9 --max-iter 10000");
    CHECK(r.status == 0);
    CHECK(near(r.out, "mean (1/lambda) = ") == doctest::Approx(39.8889).epsilon(1e-4));
}

TEST_CASE("fit: grouped weibull and exponential reproduce the reference values") {
    const auto data = write_temp("cracks.csv", kCracksCsv);
    const auto w = run("fit --model weibull --data " + data.string() +
                       " --grouped --strategy qem --k 100 --eps 1e-5 --init 1,1");
    CHECK(w.status == 0);
    CHECK(near(w.out, "lambda = ") == doctest::Approx(0.001674018).epsilon(1e-3));
    CHECK(near(w.out, "beta = ") == doctest::Approx(1.497657).epsilon(1e-3));

    const auto e = run("fit --model exponential --data " + data.string() +
                       " --grouped --strategy qem --k 10000 --eps 1e-5");
    CHECK(e.status == 0);
    CHECK(near(e.out, "lambda = ") == doctest::Approx(0.01209699).epsilon(1e-4));
}

TEST_CASE("fit: trace output matches the reference iterates") {
    const auto data = write_temp("gupta.csv", kGuptaCsv);
    const auto r = run("fit --model normal --data " + data.string() +
                       " --strategy em --eps 1e-15 --max-iter 10 --trace");
    CHECK(r.status == 0);
    // first trace row carries the s=1 iterate
    const auto row1 = r.out.find("\n  1  ");
    REQUIRE(row1 != std::string::npos);
    std::istringstream row(r.out.substr(row1 + 1));
    int s = -1;
    double mu1 = 0.0, sigma1 = 0.0;
    row >> s >> mu1 >> sigma1;
    CHECK(s == 1);
    CHECK(mu1 == doctest::Approx(1.8467).epsilon(5e-5));
    CHECK(sigma1 == doctest::Approx(0.2968).epsilon(2e-4));
    CHECK(near(r.out, "mu = ") == doctest::Approx(1.7424).epsilon(1e-4));
    CHECK(near(r.out, "sigma = ") == doctest::Approx(0.0793).epsilon(1e-3));
}

TEST_CASE("fit: JSON output round-trips byte-identically") {
    const auto data = write_temp("gupta.csv", kGuptaCsv);
    const auto r = run("fit --model normal --data " + data.string() +
                       " --strategy qem --k 100 --max-iter 10 --eps 1e-15 --output json");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["model"] == "normal");
    CHECK(j["iterations"] == 10);
    CHECK(j["trace"].size() == 11);
    CHECK(j["loglik_trace"].size() == 11);
    CHECK(j["estimate"].contains("mu"));
    // emitted text == parse + re-dump
    std::string trimmed = r.out;
    while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == '\r'))
        trimmed.pop_back();
    CHECK(j.dump(2) == trimmed);
    CHECK(nlohmann::json::parse(j.dump(2)).dump(2) == trimmed);
}

TEST_CASE("fit: MCEM with a fixed seed is reproducible") {
    const auto data = write_temp("leukemia.csv", kLeukemiaCsv);
    const std::string cmd = "fit --model exponential --data " + data.string() +
                            " --strategy mcem --k 50 --seed 99 --max-iter 8 --eps 1e-15 "
                            "--output json";
    const auto a = run(cmd);
    const auto b = run(cmd);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("exit statuses: usage errors") {
    CHECK(run("fit --model nosuch --data /dev/null").status == 2);
    CHECK(run("fit").status == 2);
    CHECK(run("frobnicate").status == 2);
    CHECK(run("fixtures --name nosuch").status == 2);
    const auto data = write_temp("mini.csv", "1,2\n");
    CHECK(run("fit --model exponential --data " + data.string() + " --init 1,2,3").status == 2);
    CHECK(run("fit --model exponential --data " + data.string() + " --output yaml").status == 2);
}

TEST_CASE("exit statuses: data errors") {
    CHECK(run("fit --model exponential --data /nonexistent.csv").status == 3);
    const auto bad = write_temp("bad.csv", "5,3\n");
    CHECK(run("fit --model exponential --data " + bad.string()).status == 3);
    const auto neg = write_temp("neg.csv", "-1,2\n");
    CHECK(run("fit --model rayleigh --data " + neg.string()).status == 3);
    const auto malformed = write_temp("malformed.csv", "1,abc\n");
    CHECK(run("fit --model normal --data " + malformed.string()).status == 3);
}

TEST_CASE("exit statuses: fit failures") {
    const auto collapsed = write_temp("collapsed.csv", "2,2\n2,2\n2,2\n");
    CHECK(run("fit --model normal --data " + collapsed.string() + " --strategy em").status == 4);
    CHECK(run("fit --model weibull --data " + collapsed.string() + " --strategy qem --k 10")
              .status == 4);
}

TEST_CASE("fixtures subcommand") {
    for (const std::string name : {"leukemia", "gupta", "balakrishnan", "rayleigh20"}) {
        const auto r = run("fixtures --name " + name);
        CHECK(r.status == 0);
        CHECK(r.out.find("reported:") != std::string::npos);
    }
}

TEST_CASE("simulate subcommand") {
    const auto cfg = write_temp("study.cfg",
                                "model = normal\nmu = 50\nsigma = 5\nn = 12\nr = 3\n"
                                "replications = 4\niterations = 4\nseed = 5\n"
                                "cells = em, qem:16\n");
    const auto out_dir = std::filesystem::temp_directory_path() / "qemfit_cli_tests" / "study_out";
    const auto r = run("simulate --config " + cfg.string() + " --out " + out_dir.string());
    CHECK(r.status == 0);
    CHECK(std::filesystem::exists(out_dir / "study.csv"));
    CHECK(std::filesystem::exists(out_dir / "study.txt"));
    std::ifstream csv(out_dir / "study.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "strategy,k,parameter,bias,mse,msd,sre,failures");

    const auto missing = write_temp("missing.cfg", "model = normal\nmu = 50\n");
    const auto m = run("simulate --config " + missing.string());
    CHECK(m.status == 2);
    CHECK(m.out.find("sigma") != std::string::npos); // names the missing key

    const auto unknown = write_temp("unknown.cfg",
                                    "model = normal\nmu = 50\nsigma = 5\nn = 5\nr = 1\n"
                                    "replications = 2\ncells = em\nbogus = 1\n");
    CHECK(run("simulate --config " + unknown.string()).status == 2);
}
