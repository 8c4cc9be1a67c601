#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platemem/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace platemem;

namespace {

SpectralField mode_field(const ModalBasis& basis, int k, double a) {
    SpectralField f(basis);
    f[k] = a;
    return f;
}

} // namespace

TEST_CASE("polynomial nonlinearity bookkeeping") {
    Nonlinearity f = Nonlinearity::cubic(4.0); // u^3 - 4u
    CHECK(f.degree() == 3);
    CHECK(f.f(2.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(f.df(1.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.F(0.0) == 0.0);
    CHECK(f.F(2.0) == doctest::Approx(4.0 - 8.0).epsilon(1e-14)); // u^4/4 - 2u^2
    CHECK(Nonlinearity::zero().degree() == 0);
}

TEST_CASE("strictly monotone cubic admits only the trivial equilibrium") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 16));
    Nonlinearity f = Nonlinearity::cubic(0.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 3; ++trial) {
        SpectralField guess(basis);
        for (int k = 0; k < guess.size(); ++k) guess[k] = gauss(rng);
        Equilibrium eq = solve_steady(basis, f, guess);
        CHECK(v_norm(eq.u, 2.0) <= 1e-9);
        CHECK(eq.residual <= 1e-10);
    }
}

TEST_CASE("softening cubic bifurcates to the known one-mode amplitude") {
    // With f(u) = u^3 - 4u the nonzero branch is c e_1 with c = sqrt(2 pi):
    // lambda_1^2 c - 4c + (3 / (2 pi)) c^3 = 0 on (0, pi)
    Nonlinearity f = Nonlinearity::cubic(4.0);
    const double c_star = std::sqrt(2.0 * M_PI);

    SUBCASE("single retained mode hits the closed form") {
        ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 1));
        Equilibrium eq = solve_steady(basis, f, mode_field(basis, 0, 2.0));
        CHECK(std::abs(eq.u[0]) == doctest::Approx(c_star).epsilon(1e-10));
        CHECK(eq.residual <= 1e-10);
    }
    SUBCASE("sixteen modes: residual at tolerance and quadratic contraction") {
        ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 16));
        Equilibrium eq = solve_steady(basis, f, mode_field(basis, 0, 2.0));
        CHECK(eq.residual <= 1e-10);
        CHECK(eq.nondegenerate);
        // higher harmonics excited by the cubic shift the leading coefficient
        // slightly away from the one-mode closed form
        CHECK(eq.u[0] == doctest::Approx(c_star).epsilon(0.01));
        CHECK(std::abs(eq.u[2]) > 1e-3);
        REQUIRE(!eq.contraction_ratios.empty());
        // the last ratios sit at the roundoff floor; quadratic convergence
        // shows as at least one small residual_{n+1} / residual_n^2
        CHECK(*std::min_element(eq.contraction_ratios.begin(), eq.contraction_ratios.end()) <= 10.0);
    }
}

TEST_CASE("stationarity residual closed forms") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 8));
    SUBCASE("zero field with zero forcing") {
        CHECK(stationarity_residual(SpectralField(basis), Nonlinearity::zero()) == 0.0);
    }
    SUBCASE("first eigenfunction with f == 0 leaves lambda_1") {
        // ||A^2 e_1||_{V^{-2}} = lambda_1^2 / lambda_1 = lambda_1 = 1
        CHECK(stationarity_residual(mode_field(basis, 0, 1.0), Nonlinearity::zero()) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("equilibrium energy closed forms and ordering") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 8));
    SUBCASE("zero field has zero energy") {
        CHECK(energy_of_u(SpectralField(basis), Nonlinearity::cubic(4.0)) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("pure bending energy of one mode is lambda^2 / 2") {
        CHECK(energy_of_u(mode_field(basis, 1, 1.0), Nonlinearity::zero()) ==
              doctest::Approx(8.0).epsilon(1e-12));
    }
    SUBCASE("the bifurcated equilibrium sits below the trivial one") {
        Nonlinearity f = Nonlinearity::cubic(4.0);
        Equilibrium eq = solve_steady(basis, f, mode_field(basis, 0, 2.0));
        CHECK(energy_of_u(eq.u, f) < 0.0);
    }
}

TEST_CASE("classification of the linearized operator A^2 + f'(u)") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 8));
    SUBCASE("hardening cubic: the origin is a nondegenerate minimizer") {
        Equilibrium eq = classify(basis, Nonlinearity::cubic(0.0), SpectralField(basis));
        CHECK(eq.nondegenerate);
        CHECK(eq.local_minimizer);
        CHECK(eq.spectrum.front() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("softening cubic: the origin turns unstable") {
        Equilibrium eq = classify(basis, Nonlinearity::cubic(4.0), SpectralField(basis));
        CHECK(eq.nondegenerate);
        CHECK_FALSE(eq.local_minimizer);
        CHECK(eq.spectrum.front() == doctest::Approx(-3.0).epsilon(1e-12));
    }
    SUBCASE("the bifurcated branch is a nondegenerate minimizer") {
        Nonlinearity f = Nonlinearity::cubic(4.0);
        Equilibrium eq = solve_steady(basis, f, mode_field(basis, 0, 2.0));
        CHECK(eq.nondegenerate);
        CHECK(eq.local_minimizer);
        CHECK(eq.spectrum.front() > 0.0);
    }
}

TEST_CASE("odd nonlinearities give symmetric equilibrium pairs") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 8));
    Nonlinearity f = Nonlinearity::cubic(4.0);
    Equilibrium plus = solve_steady(basis, f, mode_field(basis, 0, 2.0));
    Equilibrium minus = solve_steady(basis, f, mode_field(basis, 0, -2.0));
    CHECK(plus.u[0] > 1.0); // the nontrivial branch, not the origin
    for (int k = 0; k < basis.mode_count(); ++k)
        CHECK(plus.u[k] == doctest::Approx(-minus.u[k]).epsilon(1e-9));
    CHECK(energy_of_u(plus.u, f) == doctest::Approx(energy_of_u(minus.u, f)).epsilon(1e-12));
    CHECK(plus.residual <= 1e-10);
    CHECK(minus.residual <= 1e-10);
}

TEST_CASE("the steady sweep finds all three cubic branches and deduplicates") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 8));
    Nonlinearity f = Nonlinearity::cubic(4.0);
    std::vector<SpectralField> guesses = default_steady_guesses(basis);
    // duplicated guesses must not produce duplicated records
    guesses.push_back(mode_field(basis, 0, 1.01));
    std::vector<Equilibrium> found = steady_sweep(basis, f, guesses);
    CHECK(found.size() == 3);
    int zeros = 0, positive = 0, negative = 0;
    for (const Equilibrium& eq : found) {
        if (v_norm(eq.u, 2.0) <= 1e-8) ++zeros;
        else if (eq.u[0] > 0.0) ++positive;
        else ++negative;
    }
    CHECK(zeros == 1);
    CHECK(positive == 1);
    CHECK(negative == 1);
}

TEST_CASE("solve_steady rejects bad inputs") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 4));
    SpectralField bad(basis);
    bad[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_steady(basis, Nonlinearity::cubic(0.0), bad), std::invalid_argument);
    NewtonOptions opts;
    opts.tolerance = -1.0;
    CHECK_THROWS_AS(solve_steady(basis, Nonlinearity::cubic(0.0), SpectralField(basis), opts),
                    std::invalid_argument);
}
