#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using tdho::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string f; std::getline(in, f, sep);) v.push_back(f);
    return v;
}

fs::path temp_file(const std::string& name, const std::string& content = {}) {
    const auto p = fs::temp_directory_path() / ("tdho_cli_" + name);
    if (!content.empty()) {
        std::ofstream f(p);
        f << content;
    }
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

const char* kHeader = "t,omega,re_alpha,im_alpha,abs_alpha,r,vartheta,phi,variance,mean_n,norm_defect";

}  // namespace

TEST_CASE("shortest round-trip number formatting") {
    CHECK(tdho::cli::format_double(0.1) == "0.1");
    CHECK(tdho::cli::format_double(1.0) == "1");
    CHECK(tdho::cli::format_double(1e-300) == "1e-300");
    const double x = 0.40546510810816438;
    CHECK(std::stod(tdho::cli::format_double(x)) == x);
}

TEST_CASE("config text parsing") {
    const auto kv = tdho::cli::parse_config_text("# comment\nprofile = relaxing_pulse\n\nB=3pi  # width\nt_final = 5\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"profile", "relaxing_pulse"});
    CHECK(kv[1].second == "3pi");
    CHECK(kv[2].first == "t-final");
    CHECK_THROWS_AS((void)tdho::cli::parse_config_text("novalue\n"), tdho::cli::ConfigError);

    tdho::cli::ExperimentConfig cfg;
    cfg.set("B", "0.5pi");
    CHECK(cfg.B == doctest::Approx(0.5 * 3.141592653589793));
    cfg.set("n-steps", "auto");
    CHECK(cfg.n_steps == 0);
    CHECK_THROWS_AS(cfg.set("B", "-1"), tdho::cli::ConfigError);
    CHECK_THROWS_AS(cfg.set("nonsense", "1"), tdho::cli::ConfigError);
    CHECK_THROWS_AS(cfg.set("preset", "fig9"), tdho::cli::ConfigError);
}

TEST_CASE("constant profile writes all-zero r rows") {
    const auto res = call({"simulate", "--profile", "constant", "--t-final", "2", "--n-steps", "200"});
    REQUIRE(res.code == 0);
    const auto ls = lines(res.out);
    REQUIRE(ls.size() == 201);
    CHECK(ls[0] == kHeader);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = split(ls[i]);
        REQUIRE(f.size() == 11);
        CHECK(f[5] == "0");
    }
}

TEST_CASE("fingerprint appends z columns") {
    const auto res = call({"simulate", "--preset", "fig2", "--t-final", "5", "--n-steps", "5000", "--record-every",
                           "500", "--fingerprint"});
    REQUIRE(res.code == 0);
    const auto ls = lines(res.out);
    CHECK(ls[0] == std::string(kHeader) + ",re_z,im_z");
    const auto f = split(ls.back());
    REQUIRE(f.size() == 13);
    const double r = std::stod(f[5]), phi = std::stod(f[7]);
    CHECK(std::stod(f[11]) == doctest::Approx(r * std::cos(phi)));
    CHECK(std::stod(f[12]) == doctest::Approx(r * std::sin(phi)));
}

TEST_CASE("resonant preset passes the linear-growth gate") {
    const auto res = call({"simulate", "--preset", "fig2", "--format", "json"});
    REQUIRE(res.code == 0);
    CHECK(res.err.find(" linear growth") != std::string::npos);
    CHECK(res.err.find("no linear growth") == std::string::npos);

    const auto beat = call({"simulate", "--preset", "fig2", "--epsilon", "1.96"});
    REQUIRE(beat.code == 0);
    CHECK(beat.err.find("no linear growth") != std::string::npos);
}

TEST_CASE("JSON output is an array of records with the CSV fields") {
    const auto res = call({"simulate", "--profile", "sudden_jump", "--omega1", "1.5", "--t-final", "1", "--n-steps",
                           "100", "--record-every", "10", "--format", "json"});
    REQUIRE(res.code == 0);
    const auto j = nlohmann::json::parse(res.out);
    REQUIRE(j.is_array());
    CHECK(j.size() == 10);
    CHECK(j[0].size() == 11);
    CHECK(j.back()["t"].get<double>() == doctest::Approx(1.0));
    CHECK(j.back()["norm_defect"].get<double>() <= 1e-10);
}

TEST_CASE("identical configs give byte-identical files") {
    const auto a = temp_file("det_a.csv"), b = temp_file("det_b.csv");
    for (const auto& p : {a, b}) {
        const auto res = call({"simulate", "--preset", "fig1", "--t-final", "20", "--n-steps", "20000", "--output",
                               p.string()});
        REQUIRE(res.code == 0);
    }
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("config file with command-line overrides") {
    const auto cfg = temp_file("cfg.txt", "profile = relaxing_pulse\nB = 3pi\nt-final = 4\nn-steps = 400\n");
    const auto base = call({"simulate", "--config", cfg.string()});
    REQUIRE(base.code == 0);
    CHECK(lines(base.out).size() == 401);
    const auto over = call({"simulate", "--config", cfg.string(), "--n-steps", "100"});
    REQUIRE(over.code == 0);
    CHECK(lines(over.out).size() == 101);
    fs::remove(cfg);
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(call({"simulate", "--profile", "wobble"}).code == 2);
    CHECK(call({"simulate", "--B", "abc"}).code == 2);
    CHECK(call({"simulate", "--no-such-flag"}).code == 2);
    CHECK(call({"simulate", "--config", "/nonexistent/cfg"}).code == 2);
    CHECK(call({"simulate", "--profile", "tabulated"}).code == 2);
    CHECK(call({}).code == 2);
}

TEST_CASE("a zero frequency sample exits with 3 and names the step") {
    const auto tab = temp_file("zero.txt", "# t omega\n0 1\n1 -1\n");
    const auto res = call({"converge", "--profile", "tabulated", "--table", tab.string(), "--t-final", "1",
                           "--n-start", "100", "--tol", "1e-3"});
    CHECK(res.code == 3);
    CHECK(res.err.find("j = 50") != std::string::npos);
    fs::remove(tab);
}

TEST_CASE("converge reports each N and the final verdict") {
    const auto res = call({"converge", "--profile", "constant", "--t-final", "10", "--tol", "1e-8", "--n-start",
                           "1000"});
    REQUIRE(res.code == 0);
    const auto ls = lines(res.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "n_steps,max_delta_r");
    CHECK(ls[1] == "1000,");
    CHECK(ls[2] == "2000,0");
    CHECK(ls[3] == "# final_n=2000 converged=true");

    const auto capped = call({"converge", "--preset", "fig1", "--t-final", "20", "--tol", "1e-15", "--n-start",
                              "100000", "--format", "json"});
    CHECK(capped.code == 0);
    const auto j = nlohmann::json::parse(capped.out);
    CHECK(j["converged"] == false);
    CHECK(capped.err.find("warning") != std::string::npos);
}

TEST_CASE("compare of a config with itself is identical") {
    const auto cfg = temp_file("cmp.txt", "preset = fig2\nt-final = 10\nn-steps = 10000\n");
    const auto res = call({"compare", "--a", cfg.string(), "--b", cfg.string()});
    REQUIRE(res.code == 0);
    const auto ls = lines(res.out);
    CHECK(ls[0] == "t,r_a,r_b,diff");
    for (std::size_t i = 1; i + 1 < ls.size(); ++i) CHECK(split(ls[i])[3] == "0");
    CHECK(ls.back() == "# verdict: identical");
    fs::remove(cfg);
}

TEST_CASE("compare rejects mismatched grids") {
    const auto a = temp_file("cmp_a.txt", "preset = fig2\nt-final = 10\nn-steps = 10000\n");
    const auto b = temp_file("cmp_b.txt", "preset = fig2\nt-final = 10\nn-steps = 10000\nrecord-every = 7\n");
    CHECK(call({"compare", "--a", a.string(), "--b", b.string()}).code == 2);
    const auto c = temp_file("cmp_c.txt", "preset = fig2\nt-final = 11\nn-steps = 10000\n");
    CHECK(call({"compare", "--a", a.string(), "--b", c.string()}).code == 2);
    fs::remove(a);
    fs::remove(b);
    fs::remove(c);
}

TEST_CASE("sweep writes one file per member") {
    const auto out = temp_file("sweep.csv");
    const auto res = call({"sweep", "--preset", "fig1", "--t-final", "10", "--n-steps", "10000", "--output",
                           out.string()});
    REQUIRE(res.code == 0);
    const auto ls = lines(res.out);
    REQUIRE(ls.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto path = fs::temp_directory_path() / ("tdho_cli_sweep_B" + std::to_string(k) + ".csv");
        CHECK(fs::exists(path));
        CHECK(lines(slurp(path)).size() == 5001);  // auto spacing: every 2nd step
        fs::remove(path);
    }
    CHECK(call({"sweep", "--profile", "constant"}).code == 2);
}

TEST_CASE("oracle check passes on a moderate run") {
    const auto res = call({"simulate", "--preset", "fig4", "--t-final", "3", "--n-steps", "3000", "--oracle-check",
                           "--oracle-dim", "128"});
    CHECK(res.code == 0);
    CHECK(res.err.find("fidelity=") != std::string::npos);
}

TEST_CASE("installed binary reports exit codes") {
    const char* bin = std::getenv("TDHO_BIN");
    if (!bin) {
        MESSAGE("TDHO_BIN not set; skipping");
        return;
    }
    const std::string b = bin;
    CHECK(WEXITSTATUS(std::system((b + " simulate --profile constant --t-final 1 --n-steps 10 >/dev/null").c_str())) ==
          0);
    CHECK(WEXITSTATUS(std::system((b + " simulate --profile nope 2>/dev/null").c_str())) == 2);
}
