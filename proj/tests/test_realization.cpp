#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "volterra/diff.hpp"
#include "volterra/error.hpp"
#include "volterra/lattice.hpp"
#include "volterra/realization.hpp"

using namespace volterra;

namespace {
const Vec kFlat = {0.1, -0.2, 0.3, 0.4, -0.5, 0.6}; // (q1,q2,q3,p1,p2,p3)
}

TEST_CASE("phase point layout") {
    const PhasePoint x = PhasePoint::from_flat(kFlat);
    REQUIRE(x.n() == 3);
    CHECK(x.q(1) == 0.1);
    CHECK(x.q(3) == 0.3);
    CHECK(x.p(2) == -0.5);
    CHECK(norm_inf(x.flat() - kFlat) == 0.0);
    CHECK_THROWS_AS(PhasePoint::from_flat(Vec{1.0, 2.0, 3.0}), DimensionError);
    CHECK_THROWS_AS(PhasePoint(Vec{1.0}, Vec{1.0, 2.0}), DimensionError);
}

TEST_CASE("realization map") {
    // u_{2i-1} = -e^{p_i}, u_{2i} = e^{q_{i+1}-q_i}
    const PhasePoint origin(Vec{0.0, 0.0}, Vec{0.0, 0.0});
    CHECK(norm_inf(realize(origin).values() - Vec{-1.0, 1.0, -1.0}) == 0.0);

    const PhasePoint x = PhasePoint::from_flat(kFlat);
    const UPoint u = realize(x);
    REQUIRE(u.m() == 5);
    CHECK(u.at(1) == Catch::Approx(-std::exp(0.4)));
    CHECK(u.at(2) == Catch::Approx(std::exp(-0.3)));
    CHECK(u.at(3) == Catch::Approx(-std::exp(-0.5)));
    CHECK(u.at(4) == Catch::Approx(std::exp(0.5)));
    CHECK(u.at(5) == Catch::Approx(-std::exp(0.6)));

    const Matrix d = d_realize(x);
    REQUIRE(d.rows() == 5);
    REQUIRE(d.cols() == 6);
    const Matrix d_fd = jacobian_fd(
        [](const Vec& v) { return realize(PhasePoint::from_flat(v)).values(); }, kFlat, {});
    CHECK((d - d_fd).max_abs() < 1e-7);
}

TEST_CASE("preimage inverts realize on the leaf") {
    const PhasePoint x = PhasePoint::from_flat(kFlat);
    const UPoint u = realize(x);

    const PhasePoint back = preimage(u);
    CHECK(back.q(1) == 0.0); // default gauge
    CHECK(norm_inf(realize(back).values() - u.values()) < 1e-14);

    const PhasePoint shifted = preimage(u, 0.7);
    CHECK(shifted.q(1) == Catch::Approx(0.7));
    CHECK(shifted.q(2) - shifted.q(1) == Catch::Approx(back.q(2) - back.q(1)));
    CHECK(shifted.p(2) == Catch::Approx(back.p(2)));
    CHECK(norm_inf(realize(shifted).values() - u.values()) < 1e-14);

    CHECK_THROWS_AS(preimage(UPoint({1.0, 1.0, 1.0})), DomainViolation);
    CHECK_THROWS_AS(preimage(UPoint({-1.0, 1.0})), DomainViolation);
    CHECK_THROWS_AS(preimage(UPoint({-1.0, -1.0, -1.0})), DomainViolation);
}

TEST_CASE("hamiltonians on the symplectic side") {
    const PhasePoint origin(Vec{0.0, 0.0}, Vec{0.0, 0.0});
    CHECK(hamiltonian_h(origin, 1) == Catch::Approx(-1.0));
    CHECK(hamiltonian_h(origin, 2) == Catch::Approx(-0.5));

    // h_i = H_i / 2 through the realization
    const PhasePoint x = PhasePoint::from_flat(kFlat);
    for (unsigned i : {1u, 2u})
        CHECK(hamiltonian_h(x, i) ==
              Catch::Approx(0.5 * invariant_h(realize(x), i)).epsilon(1e-12));

    for (unsigned i : {1u, 2u}) {
        const Vec g = grad_hamiltonian_h(x, i);
        const Vec g_fd = gradient_fd(
            [i](const Vec& v) { return hamiltonian_h(PhasePoint::from_flat(v), i); },
            kFlat, {});
        CHECK(norm_inf(g - g_fd) < 1e-7);
    }
    CHECK_THROWS_AS(hamiltonian_h(x, 3), Unsupported);
}

TEST_CASE("canonical tensor") {
    const Matrix j2 = tensor_j2(3);
    REQUIRE(j2.rows() == 6);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(j2(i, i + 3) == 1.0);
        CHECK(j2(i + 3, i) == -1.0);
    }
    CHECK(j2.max_abs() == 1.0);
    CHECK(j2.antisymmetry_defect() == 0.0);
}

TEST_CASE("cubic tensor matches the printed table") {
    const PhasePoint x = PhasePoint::from_flat(kFlat);
    const double a1 = std::exp(0.4), a2 = std::exp(-0.5), a3 = std::exp(0.6);
    const double b1 = std::exp(-0.3), b2 = std::exp(0.5);

    const Matrix j3 = tensor_j3(x);
    CHECK(j3(0, 1) == Catch::Approx(-a1));
    CHECK(j3(0, 2) == Catch::Approx(-a1));
    CHECK(j3(0, 3) == Catch::Approx(-a1));
    CHECK(j3(0, 4) == Catch::Approx(0.0).margin(1e-15));
    CHECK(j3(0, 5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(j3(1, 2) == Catch::Approx(-a2));
    CHECK(j3(1, 3) == Catch::Approx(-b1));
    CHECK(j3(1, 4) == Catch::Approx(-a2 + b1));
    CHECK(j3(1, 5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(j3(2, 3) == Catch::Approx(-b1));
    CHECK(j3(2, 4) == Catch::Approx(b1 - b2));
    CHECK(j3(2, 5) == Catch::Approx(-a3 + b2));
    CHECK(j3(3, 4) == Catch::Approx(b1));
    CHECK(j3(3, 5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(j3(4, 5) == Catch::Approx(b2));
    CHECK(j3.antisymmetry_defect() == 0.0);

    const std::vector<Matrix> parts = tensor_j3_partials(x);
    const std::vector<Matrix> parts_fd = matrix_partials_fd(
        [](const Vec& v) { return tensor_j3(PhasePoint::from_flat(v)); }, kFlat, {});
    for (std::size_t c = 0; c < 6; ++c) CHECK((parts[c] - parts_fd[c]).max_abs() < 1e-7);
}

TEST_CASE("master symmetries on the symplectic side") {
    const PhasePoint origin2(Vec{0.0, 0.0}, Vec{0.0, 0.0});
    CHECK(norm_inf(symmetry_x(0, origin2) - Vec{1.0, 2.0, 1.0, 1.0}) == 0.0);
    CHECK(norm_inf(symmetry_x(1, origin2) - Vec{-1.0, -3.0, 1.0, -2.0}) == 0.0);
    CHECK(norm_inf(chi1(origin2) - Vec{-1.0, -1.0, 1.0, -1.0}) == 0.0);
    CHECK_THROWS_AS(symmetry_x(2, origin2), Unsupported);

    const PhasePoint x = PhasePoint::from_flat(kFlat);
    for (int k : {0, 1}) {
        const Matrix j = symmetry_x_jacobian(k, x);
        const Matrix j_fd = jacobian_fd(
            [k](const Vec& v) { return symmetry_x(k, PhasePoint::from_flat(v)); }, kFlat,
            {});
        CHECK((j - j_fd).max_abs() < 1e-7);
    }
    const Matrix jc = chi1_jacobian(x);
    const Matrix jc_fd = jacobian_fd(
        [](const Vec& v) { return chi1(PhasePoint::from_flat(v)); }, kFlat, {});
    CHECK((jc - jc_fd).max_abs() < 1e-7);
}

TEST_CASE("canonical tensor pushes to the quadratic bracket") {
    const PhasePoint x = PhasePoint::from_flat(kFlat);
    const Matrix d = d_realize(x);
    const Matrix pushed = d * tensor_j2(3) * d.transpose();
    CHECK((pushed - bracket_pi(2, realize(x))).max_abs() < 1e-13);
}
