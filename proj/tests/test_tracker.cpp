#include <catch_amalgamated.hpp>

#include <cmath>

#include "ecav/tracker.hpp"

using namespace ecav;

namespace {

std::vector<double> grid_to(double e_end, double de) {
    std::vector<double> g;
    for (double e = 0.0; e < e_end + de / 2; e += de) g.push_back(std::min(e, e_end));
    return g;
}

ModeTrajectory synthetic(ModeLabel label, const std::vector<double>& e,
                         const std::vector<double>& re) {
    ModeTrajectory t;
    t.label = label;
    t.kind = SolveKind::closed;
    t.e_grid = e;
    for (double v : re) t.kR_values.push_back(cd(v, 0.0));
    return t;
}

}  // namespace

TEST_CASE("closed trajectory starts at the Bessel zero and stays real") {
    CavityConfig cfg;
    auto t = track_mode(grid_to(0.1, 0.02), {3, 1}, SolveKind::closed, cfg);
    REQUIRE(t.complete());
    CHECK(t.kR_values.front().real() == Catch::Approx(circle_billiard_k({3, 1})).margin(1e-8));
    for (const cd& k : t.kR_values) CHECK(std::abs(k.imag()) < 1e-8);
    // continuity: no step larger than 3x the median step, up to an absolute
    // floor (the curve is flat at e=0, so early steps shrink the median; a
    // genuine root jump would be of order the mode spacing ~0.1)
    std::vector<double> steps;
    for (std::size_t i = 1; i < t.kR_values.size(); ++i)
        steps.push_back(std::abs(t.kR_values[i] - t.kR_values[i - 1]));
    std::sort(steps.begin(), steps.end());
    const double med = steps[steps.size() / 2];
    CHECK(steps.back() <= std::max(3.0 * med, 1e-3));
}

TEST_CASE("open trajectory starts at the matching root and keeps Im < 0") {
    CavityConfig cfg;
    auto t = track_mode(grid_to(0.08, 0.02), {3, 1}, SolveKind::open, cfg);
    REQUIRE(t.complete());
    const cd oracle = circle_cavity_k({3, 1}, cfg.n);
    CHECK(std::abs(t.kR_values.front() - oracle) < 1e-6);
    for (const cd& k : t.kR_values) CHECK(k.imag() < 0.0);
}

TEST_CASE("step halving changes the trajectory by less than 1e-4") {
    CavityConfig cfg;
    auto coarse = track_mode(grid_to(0.2, 0.02), {3, 1}, SolveKind::closed, cfg);
    auto fine = track_mode(grid_to(0.2, 0.01), {3, 1}, SolveKind::closed, cfg);
    REQUIRE(coarse.complete());
    REQUIRE(fine.complete());
    for (std::size_t i = 0; i < coarse.e_grid.size(); ++i) {
        CHECK(std::abs(coarse.e_grid[i] - fine.e_grid[2 * i]) < 1e-12);
        CHECK(std::abs(coarse.kR_values[i] - fine.kR_values[2 * i]) < 1e-4);
    }
}

TEST_CASE("grid preconditions") {
    CavityConfig cfg;
    CHECK_THROWS_AS(track_mode({0.1, 0.2}, {3, 1}, SolveKind::closed, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(track_mode({0.0, 0.05}, {3, 1}, SolveKind::closed, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(track_mode({0.0, 0.02, 0.01}, {3, 1}, SolveKind::closed, cfg),
                    std::invalid_argument);
}

TEST_CASE("crossing detection on synthetic trajectories") {
    const std::vector<double> e = {0.0, 0.01, 0.02, 0.03, 0.04};

    SECTION("sign change gives an interpolated crossing") {
        auto a = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        auto b = synthetic({2, 1}, e, {0.97, 0.99, 1.01, 1.03, 1.05});
        auto rep = detect_crossings(a, b);
        REQUIRE(rep.events.size() == 1);
        CHECK(rep.events[0].kind == CrossingClass::crossing);
        CHECK(rep.events[0].e == Catch::Approx(0.015).margin(1e-12));
    }

    SECTION("gap minimum above delta_cross is an avoided crossing") {
        auto a = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        auto b = synthetic({2, 1}, e, {0.9, 0.96, 0.99, 0.96, 0.9});
        auto rep = detect_crossings(a, b);
        REQUIRE(rep.events.size() == 1);
        CHECK(rep.events[0].kind == CrossingClass::avoided_crossing);
        CHECK(rep.events[0].e == Catch::Approx(0.02));
        CHECK(rep.events[0].gap == Catch::Approx(0.01));
        CHECK(rep.min_gap == Catch::Approx(0.01));
        CHECK(rep.e_min_gap == Catch::Approx(0.02));
    }

    SECTION("gap minimum below delta_cross is a crossing") {
        auto a = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        auto b = synthetic({2, 1}, e, {0.9, 0.96, 1.0 - 5e-4, 0.96, 0.9});
        auto rep = detect_crossings(a, b);
        REQUIRE(rep.events.size() == 1);
        CHECK(rep.events[0].kind == CrossingClass::crossing);
    }

    SECTION("shallow dip on well-separated curves yields no event") {
        auto a = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        auto b = synthetic({2, 1}, e, {2.05, 2.03, 2.0, 2.03, 2.05});
        auto rep = detect_crossings(a, b);
        CHECK(rep.events.empty());
        CHECK(rep.min_gap == Catch::Approx(1.0));
    }

    SECTION("monotone gap yields no event") {
        auto a = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        auto b = synthetic({2, 1}, e, {0.9, 0.8, 0.7, 0.6, 0.5});
        auto rep = detect_crossings(a, b);
        CHECK(rep.events.empty());
        CHECK(rep.min_gap == Catch::Approx(0.1));
    }

    SECTION("error paths") {
        auto a = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        auto b = synthetic({1, 1}, e, {1.0, 1.0, 1.0, 1.0, 1.0});
        CHECK_THROWS_AS(detect_crossings(a, b), std::invalid_argument);
        auto c = synthetic({2, 1}, {0.0, 0.02, 0.04, 0.06, 0.08}, {1, 1, 1, 1, 1});
        CHECK_THROWS_AS(detect_crossings(a, c), std::domain_error);
        auto d = synthetic({2, 1}, e, {1, 1, 1, 1, 1});
        d.kind = SolveKind::open;
        CHECK_THROWS_AS(detect_crossings(a, d), std::domain_error);
    }
}

TEST_CASE("closed pair crossing is detected on real data") {
    // (m=0, l=2) and (m=3, l=1) are 0.13 apart at e=0 and share y-parity only
    // in the full spectrum sense; tracked independently their Re kR curves may
    // cross. This exercises detect_crossings end to end on solver output.
    CavityConfig cfg;
    auto a = track_mode(grid_to(0.3, 0.02), {3, 1}, SolveKind::closed, cfg);
    auto b = track_mode(grid_to(0.3, 0.02), {0, 2}, SolveKind::closed, cfg);
    REQUIRE(a.complete());
    REQUIRE(b.complete());
    auto rep = detect_crossings(a, b);
    for (const auto& ev : rep.events) CHECK(ev.kind == CrossingClass::crossing);
}
