#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <map>
#include <string>

#include "volterra/error.hpp"
#include "volterra/verify.hpp"

using namespace volterra;

namespace {

std::map<std::string, IdentityReport> by_id(const std::vector<IdentityReport>& reports) {
    std::map<std::string, IdentityReport> m;
    for (const IdentityReport& r : reports) m[r.identity_id] = r;
    return m;
}

void check_all_passed(const std::vector<IdentityReport>& reports) {
    for (const IdentityReport& r : reports) {
        INFO(r.identity_id << " max_residual " << r.max_residual << " tol " << r.tolerance);
        CHECK(r.passed);
        CHECK_FALSE(r.vacuous);
    }
}

} // namespace

TEST_CASE("rng stream is stable and uniform-range") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform(0.2, 2.0);
        CHECK(x == b.uniform(0.2, 2.0));
        CHECK(x >= 0.2);
        CHECK(x < 2.0);
    }
    CHECK(mix_seed(1, "jacobi", 3) != mix_seed(1, "jacobi", 5));
    CHECK(mix_seed(1, "jacobi", 3) != mix_seed(2, "jacobi", 3));
    CHECK(mix_seed(1, "jacobi", 3) != mix_seed(1, "lenard", 3));
}

TEST_CASE("samplers respect their domains") {
    Rng rng(7);
    const UPoint up = sample_u_positive(rng, 5);
    for (double v : up.values()) {
        CHECK(v >= 0.2);
        CHECK(v <= 2.0);
    }
    const UPoint leaf = sample_u_leaf(rng, 5);
    CHECK(leaf.at(1) < 0.0);
    CHECK(leaf.at(2) > 0.0);
    CHECK(leaf.at(3) < 0.0);
    CHECK(leaf.at(5) < 0.0);
    const PhasePoint x = sample_qp(rng, 3);
    for (double v : x.flat()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("jacobi family, including the negative control") {
    const auto reports = run_identity_suite("jacobi", {3, 5}, {2}, 8, 20260814);
    check_all_passed(reports);
    const auto m = by_id(reports);
    REQUIRE(m.count("jacobi/pi2/m=3") == 1);
    REQUIRE(m.count("jacobi/pi0/m=3") == 1);
    REQUIRE(m.count("jacobi/pi1+pi3/m=5") == 1);
    REQUIRE(m.count("jacobi/J1/n=2") == 1);
    REQUIRE(m.count("jacobi/J4/n=2") == 1);
    const auto control = m.find("jacobi/negative-control/pi3-corrupted/m=3");
    REQUIRE(control != m.end());
    CHECK(control->second.passed); // passed = the corruption was detected
    CHECK(control->second.note.find("min corrupted residual") != std::string::npos);
}

TEST_CASE("involution and lenard families") {
    check_all_passed(run_identity_suite("involution", {3, 4, 5}, {}, 8, 1));
    check_all_passed(run_identity_suite("lenard", {3, 5}, {}, 8, 1));
}

TEST_CASE("lie-derivative ladders") {
    const auto reports = run_identity_suite("ladder-u", {5}, {}, 6, 3);
    check_all_passed(reports);
    const auto m = by_id(reports);
    // the verified ladder constants
    REQUIRE(m.count("ladder-u/LYm1-pi2=pi1/m=5") == 1);
    REQUIRE(m.count("ladder-u/LY1-pi1=-2pi2/m=5") == 1);
    REQUIRE(m.count("ladder-u/LY1-pi2=-pi3/m=5") == 1);
    REQUIRE(m.count("ladder-u/Y1(H4)/m=5") == 1);

    check_all_passed(run_identity_suite("ladder-qp", {}, {2, 3}, 6, 3));
}

TEST_CASE("oevel deformation relations") {
    check_all_passed(run_identity_suite("oevel-a", {}, {2, 3}, 8, 5));
    check_all_passed(run_identity_suite("oevel-b", {}, {2, 3}, 5, 5));
    check_all_passed(run_identity_suite("oevel-c", {}, {2, 3}, 5, 5));
    check_all_passed(run_identity_suite("conformal", {3, 5}, {2}, 6, 5));
}

TEST_CASE("pushforward family") {
    const auto reports = run_identity_suite("pushforward", {}, {2, 3}, 6, 11);
    check_all_passed(reports);
    const auto m = by_id(reports);
    const auto ratio = m.find("pushforward/h2-pullback-ratio/n=3");
    REQUIRE(ratio != m.end());
    CHECK(ratio->second.note.find("0.5") != std::string::npos);
    REQUIRE(m.count("pushforward/J0->pi0/n=2") == 1);
    CHECK(m.count("pushforward/J0->pi0/n=3") == 0); // pi_0 exists only on m=3
}

TEST_CASE("isospectral and henon-toda families") {
    check_all_passed(run_identity_suite("isospectral", {3, 5}, {}, 4, 13));
    check_all_passed(run_identity_suite("henon-toda", {3, 5}, {}, 6, 13));
}

TEST_CASE("suite determinism") {
    const auto a = run_identity_suite("lenard", {5}, {}, 10, 99);
    const auto b = run_identity_suite("lenard", {5}, {}, 10, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].identity_id == b[i].identity_id);
        CHECK(std::memcmp(&a[i].max_residual, &b[i].max_residual, sizeof(double)) == 0);
    }
    const auto c = run_identity_suite("lenard", {5}, {}, 10, 100);
    bool any_differ = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_differ = any_differ || (a[i].max_residual != c[i].max_residual);
    CHECK(any_differ);
}

TEST_CASE("zero points is vacuous, not failing") {
    const auto reports = run_identity_suite("ladder-u", {3}, {}, 0, 1);
    REQUIRE_FALSE(reports.empty());
    for (const IdentityReport& r : reports) {
        CHECK(r.points_tested == 0);
        CHECK(r.vacuous);
        CHECK(r.passed);
    }
}

TEST_CASE("unknown family is rejected") {
    CHECK_THROWS_AS(run_identity_suite("frobnicate", {}, {}, 1, 1), Unsupported);
}

TEST_CASE("family registry") {
    const auto& fams = identity_families();
    CHECK(fams.size() == 12);
    for (const std::string& f : fams) CHECK_NOTHROW(run_identity_suite(f, {3}, {2}, 0, 1));
}
