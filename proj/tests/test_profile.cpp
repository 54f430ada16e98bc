#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "tdho/profile.hpp"

using tdho::Profile;
using tdho::SamplingRule;

constexpr double pi = std::numbers::pi;

TEST_CASE("every kind equals omega_0 for t <= 0") {
    const Profile kinds[] = {
        Profile::constant(1.3),
        Profile::relaxing_pulse(3 * pi, 1.3),
        Profile::parametric_resonance(1.04, 2.04, 1.3),
        Profile::janszky_adam(1.5, 1.3),
        Profile::sudden_jump(1.5, 1.3),
        Profile::tabulated({0.0, 1.0}, {2.0, 3.0}, 1.3),
    };
    for (const auto& p : kinds) {
        CHECK(tdho::eval_profile(p, 0.0) == 1.3);
        CHECK(tdho::eval_profile(p, -5.0) == 1.3);
    }
}

TEST_CASE("relaxing pulse formula") {
    const auto p = Profile::relaxing_pulse(3 * pi);
    CHECK(tdho::eval_profile(p, 0.0) == 1.0);
    for (double t : {0.5, 3.0, 17.0, 149.0}) {
        CHECK(tdho::eval_profile(p, t) == doctest::Approx(1.0 + 0.5 * t * std::exp(-t / (3 * pi))).epsilon(1e-15));
    }
    // Peak of 1 + t/2 e^{-t/B} sits at t = B.
    const double B = 0.5 * pi;
    const auto q = Profile::relaxing_pulse(B);
    CHECK(tdho::eval_profile(q, B) > tdho::eval_profile(q, 0.99 * B));
    CHECK(tdho::eval_profile(q, B) > tdho::eval_profile(q, 1.01 * B));
}

TEST_CASE("parametric resonance limits") {
    const auto p = Profile::parametric_resonance(1.04, 2.04);
    CHECK(tdho::eval_profile(p, 1e-300) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tdho::eval_profile(p, pi / 2.04) == doctest::Approx(1.04).epsilon(1e-15));
    CHECK(p.modulation_period() == doctest::Approx(2 * pi / 2.04));
}

TEST_CASE("Janszky-Adam square wave takes two values with right-closed holds") {
    const auto p = Profile::janszky_adam(1.5);
    const double hh = pi / 3.0, hl = pi / 2.0;
    CHECK(p.modulation_period() == doctest::Approx(hh + hl));
    CHECK(tdho::eval_profile(p, 1e-9) == 1.5);
    CHECK(tdho::eval_profile(p, hh) == 1.5);
    CHECK(tdho::eval_profile(p, hh + 1e-9) == 1.0);
    CHECK(tdho::eval_profile(p, hh + hl - 1e-9) == 1.0);
    CHECK(tdho::eval_profile(p, hh + hl + 1e-9) == 1.5);

    std::set<double> values;
    for (int i = 1; i <= 10000; ++i) values.insert(tdho::eval_profile(p, 0.003 * i));
    CHECK(values == std::set<double>{1.0, 1.5});

    const auto custom = Profile::janszky_adam(2.0, 0.1, 0.2, 1.0);
    CHECK(tdho::eval_profile(custom, 0.05) == 2.0);
    CHECK(tdho::eval_profile(custom, 0.25) == 1.0);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS((void)Profile::relaxing_pulse(0.0), tdho::DomainError);
    CHECK_THROWS_AS((void)Profile::parametric_resonance(-1.0, 2.0), tdho::DomainError);
    CHECK_THROWS_AS((void)Profile::janszky_adam(0.0), tdho::DomainError);
    CHECK_THROWS_AS((void)Profile::sudden_jump(1.5, 0.0), tdho::DomainError);
    CHECK_THROWS_AS((void)Profile::tabulated({0.0}, {1.0}), tdho::DomainError);
    CHECK_THROWS_AS((void)Profile::tabulated({0.0, 0.0}, {1.0, 1.0}), tdho::DomainError);
}

TEST_CASE("discretize examples") {
    const auto c = tdho::discretize(Profile::constant(), 3.0, 10);
    CHECK(c.n_steps() == 10);
    CHECK(c.tau == doctest::Approx(0.3));
    for (double w : c.samples) CHECK(w == 1.0);

    const auto j = tdho::discretize(Profile::sudden_jump(1.5), 1.0, 4);
    CHECK(j.samples == std::vector<double>{1.5, 1.5, 1.5, 1.5});

    CHECK_THROWS_AS((void)tdho::discretize(Profile::constant(), 0.0, 10), tdho::DomainError);
    CHECK_THROWS_AS((void)tdho::discretize(Profile::constant(), 1.0, 0), tdho::DomainError);
}

TEST_CASE("right-endpoint samples equal direct evaluation exactly") {
    const auto p = Profile::relaxing_pulse(0.5 * pi);
    const auto d = tdho::discretize(p, 150.0, 150000);
    CHECK(d.tau * 150000.0 == doctest::Approx(150.0).epsilon(1e-15));
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> pick(1, 150000);
    for (int i = 0; i < 5; ++i) {
        const std::size_t jj = pick(rng);
        const double t = static_cast<double>(jj) * d.tau;
        CHECK(d.samples[jj - 1] == tdho::eval_profile(p, t));
        CHECK(d.samples[jj - 1] == 1.0 + 0.5 * t * std::exp(-t / (0.5 * pi)));
    }
    for (std::size_t jj = 1; jj <= d.n_steps(); ++jj) {
        if (d.samples[jj - 1] != tdho::eval_profile(p, static_cast<double>(jj) * d.tau)) {
            FAIL("sample mismatch at j = " << jj);
        }
    }
}

TEST_CASE("midpoint rule samples segment centres") {
    const auto p = Profile::parametric_resonance(1.04, 2.0);
    const auto d = tdho::discretize(p, 10.0, 100, SamplingRule::midpoint);
    CHECK(d.samples[0] == tdho::eval_profile(p, 0.05));
    CHECK(d.samples[99] == tdho::eval_profile(p, 9.95));
}

TEST_CASE("refinement moves overlapping samples by O(tau)") {
    // |d omega/dt| <= 1/2 for the relaxing pulse and |omega_0 - omega_l| epsilon / 2 for the resonance.
    struct Case {
        Profile p;
        double lipschitz;
    };
    const Case cases[] = {{Profile::relaxing_pulse(3 * pi), 0.5},
                          {Profile::parametric_resonance(1.04, 2.04), 0.5 * 0.04 * 2.04}};
    for (const auto& c : cases) {
        const auto coarse = tdho::discretize(c.p, 50.0, 1000);
        const auto fine = tdho::discretize(c.p, 50.0, 2000);
        double worst = 0.0;
        for (std::size_t j = 1; j <= 1000; ++j) {
            worst = std::max(worst, std::abs(fine.samples[2 * j - 1] - coarse.samples[j - 1]));
        }
        CHECK(worst <= c.lipschitz * coarse.tau + 1e-12);
    }
}

TEST_CASE("non-positive samples report the first offending step") {
    // omega reaches zero at t = 0.5 and goes negative afterwards.
    const auto p = Profile::tabulated({0.0, 1.0}, {1.0, -1.0});
    try {
        (void)tdho::discretize(p, 1.0, 10);
        FAIL("expected ProfileDomainError");
    } catch (const tdho::ProfileDomainError& e) {
        CHECK(e.index() == 5);
    }
}

TEST_CASE("tabulated profiles interpolate linearly and reject out-of-range times") {
    const auto tab = tdho::parse_tabulated("# t omega\n0 1\n1.0, 2.0\n\n3 2  # flat\n");
    REQUIRE(tab.t.size() == 3);
    const auto p = Profile::tabulated(tab.t, tab.omega);
    CHECK(tdho::eval_profile(p, 0.25) == doctest::Approx(1.25));
    CHECK(tdho::eval_profile(p, 1.0) == 2.0);
    CHECK(tdho::eval_profile(p, 2.0) == 2.0);
    CHECK_THROWS_AS((void)tdho::eval_profile(p, 3.5), tdho::RangeError);

    // Tables ending exactly at t_final survive j * tau rounding.
    CHECK_NOTHROW((void)tdho::discretize(p, 3.0, 30001));

    CHECK_THROWS_AS((void)tdho::parse_tabulated("0 1 2\n1 1\n"), tdho::DomainError);
    CHECK_THROWS_AS((void)tdho::parse_tabulated("0\n"), tdho::DomainError);
    CHECK_THROWS_AS((void)tdho::parse_tabulated("a b\n"), tdho::DomainError);
}

TEST_CASE("tabulated profiles load from files") {
    const auto path = std::filesystem::temp_directory_path() / "tdho_test_profile.txt";
    {
        std::ofstream f(path);
        f << "# sample table\n0 1.0\n2 1.5\n";
    }
    const auto tab = tdho::read_tabulated(path);
    CHECK(tab.omega == std::vector<double>{1.0, 1.5});
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)tdho::read_tabulated(path), tdho::DomainError);
}

TEST_CASE("describe names the kind and parameters") {
    CHECK(Profile::relaxing_pulse(2.0).describe() == "relaxing_pulse(omega_0=1,B=2)");
    CHECK(tdho::to_string(Profile::sudden_jump(1.5).kind()) == "sudden_jump");
}
