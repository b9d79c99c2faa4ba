#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "volterra/error.hpp"
#include "volterra/integrate.hpp"

using namespace volterra;

TEST_CASE("rk4 on a linear equation") {
    // x' = -x from 1: x(1) = e^{-1}
    auto rhs = [](const Vec& v) { return Vec{-v[0]}; };
    const Trajectory tr = integrate_rk4(rhs, {1.0}, 1.0, 1e-2);
    REQUIRE(tr.times.size() == 101);
    CHECK(tr.times.back() == Catch::Approx(1.0));
    CHECK(tr.states.back()[0] == Catch::Approx(std::exp(-1.0)).epsilon(1e-9));

    CHECK_THROWS_AS(integrate_rk4(rhs, {1.0}, 1.0, 0.0), Error);
    CHECK_THROWS_AS(integrate_rk4(rhs, {1.0}, -1.0, 0.1), Error);
}

TEST_CASE("zero time yields the initial snapshot") {
    const Trajectory tr = integrate_volterra(UPoint({1.0, 2.0}), 0.0, 0.1);
    REQUIRE(tr.times.size() == 1);
    CHECK(tr.states[0][1] == 2.0);
    REQUIRE_FALSE(tr.monitors.empty());
}

TEST_CASE("two-site flow conserves the trace invariant") {
    // m = 2: u1' = u1 u2, u2' = -u1 u2; H_1 = 2(u1 + u2) constant
    const Trajectory tr = integrate_volterra(UPoint({1.0, 1.0}), 5.0, 1e-3);
    CHECK(monitor_drift(tr, 0, 2) < 1e-12);
    CHECK(tr.states.back()[0] + tr.states.back()[1] == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("isospectral drift stays at solver accuracy") {
    const IsospectralDriftResult d =
        isospectral_drift(UPoint({1.0, 2.0, 3.0, 4.0, 5.0}), 1.0, 1e-3);
    CHECK(d.h_drift < 1e-10);
    CHECK(d.eig_drift < 1e-10);
}

TEST_CASE("monitor columns carry names") {
    const Trajectory tr = integrate_volterra(UPoint({1.0, 2.0, 3.0}), 0.1, 1e-2);
    REQUIRE(tr.monitor_names.size() == 3 + 4); // H1..H3 and four eigenvalues
    CHECK(tr.monitor_names[0] == "H1");
    CHECK(tr.monitor_names[3] == "lambda1");
    CHECK(tr.note.empty());
    // eigenvalues come out sorted
    const Vec& row = tr.monitors.front();
    CHECK(row[3] <= row[4]);
    CHECK(row[5] <= row[6]);
}

TEST_CASE("eigenvalue monitor disables itself off the positive orthant") {
    const Trajectory tr = integrate_volterra(UPoint({-1.0, 1.0, -1.0}), 0.1, 1e-3);
    REQUIRE(tr.monitor_names.size() == 3); // only H1..H3
    CHECK(tr.note.find("disabled") != std::string::npos);
    CHECK(monitor_drift(tr, 0, 3) < 1e-12);
}

TEST_CASE("blow-up reports the last finite time") {
    // u' = u^2 from 1 blows up at t = 1
    auto rhs = [](const Vec& v) { return Vec{v[0] * v[0]}; };
    try {
        integrate_rk4(rhs, {1.0}, 2.0, 1e-3);
        FAIL("expected NonFinite");
    } catch (const NonFinite& e) {
        CHECK(e.last_valid_time > 0.9);
        CHECK(e.last_valid_time < 1.1);
    }
}

TEST_CASE("realization intertwines the chi_1 and volterra flows") {
    const UPoint u0({-0.1, 0.1, -0.1, 0.1, -0.1});
    const PairedTrajectory pt = integrate_qp_vs_u(preimage(u0), 1.0, 1e-3);
    CHECK(pt.max_gap < 1e-10);
    CHECK(monitor_drift(pt.first, 0, 4) < 1e-9);
    REQUIRE(pt.gap.size() == pt.first.times.size());
    CHECK(pt.gap.front() < 1e-15);
}

TEST_CASE("chi_1 flow from the phase-space origin escapes in finite time") {
    const PhasePoint origin(Vec{0.0, 0.0, 0.0}, Vec{0.0, 0.0, 0.0});
    try {
        integrate_qp_vs_u(origin, 5.0, 1e-3);
        FAIL("expected NonFinite");
    } catch (const NonFinite& e) {
        CHECK(e.last_valid_time > 1.2);
        CHECK(e.last_valid_time < 1.45);
    }
}

TEST_CASE("henon map intertwines the volterra and toda flows") {
    const PairedTrajectory pt =
        integrate_henon_pair(UPoint({1.0, 2.0, 3.0, 4.0, 5.0}), 1.0, 1e-3);
    CHECK(pt.max_gap < 1e-9);
    CHECK(pt.gap.front() == 0.0);
}

TEST_CASE("rk4 order factor under halving") {
    const double factor = rk4_order_factor(UPoint({1.0, 2.0, 3.0, 4.0, 5.0}), 1.0, 1e-2);
    CHECK(factor > 8.0);
    CHECK(factor < 32.0);
}
