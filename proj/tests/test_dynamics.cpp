#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platemem/diagnostics.hpp"
#include "platemem/dynamics.hpp"

#include <cmath>
#include <vector>

using namespace platemem;

namespace {

struct Setup {
    ModalBasis basis;
    KernelQuadrature quad;
    ModelParams params;
    SchemeConfig scheme;

    Setup(int modes, double dt, double total_time, Nonlinearity f, double side = M_PI)
        : basis(build_basis(DomainSpec::interval(side, modes))),
          quad(build_quadrature(make_exponential(1.0, 1.0), dt, 1e-8)) {
        params.f = std::move(f);
        scheme.dt = dt;
        scheme.total_time = total_time;
        scheme.scheme = Scheme::ImexCN;
    }
};

} // namespace

TEST_CASE("the origin is a fixed point of both schemes") {
    for (Scheme s : {Scheme::Imex1, Scheme::ImexCN}) {
        Setup env(8, 0.01, 1.0, Nonlinearity::cubic(1.0));
        env.scheme.scheme = s;
        StateVector z0(env.basis, env.quad);
        StateVector zT = simulate(std::move(z0), env.basis, env.quad, env.params, env.scheme);
        CHECK(zT.norm() == 0.0);
        CHECK(zT.t == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("a Newton equilibrium stays frozen under the flow") {
    Setup env(8, 0.01, 1.0, Nonlinearity::cubic(4.0));
    SpectralField guess(env.basis);
    guess[0] = 2.0;
    Equilibrium eq = solve_steady(env.basis, env.params.f, guess);
    StateVector z0(env.basis, env.quad);
    z0.u = eq.u;
    StateVector zstart = z0;
    StateVector zT = simulate(std::move(z0), env.basis, env.quad, env.params, env.scheme);
    CHECK(state_distance(zT, zstart, 0.0) <= 1e-10);
}

TEST_CASE("zero total time returns the initial state after one sample") {
    Setup env(4, 0.01, 0.0, Nonlinearity::cubic(1.0));
    StateVector z0 = random_state(env.basis, env.quad, 42, 1.0);
    StateVector copy = z0;
    int samples = 0;
    StateVector zT = simulate(std::move(z0), env.basis, env.quad, env.params, env.scheme,
                              [&](const StateVector&) { ++samples; });
    CHECK(samples == 1);
    CHECK(state_distance(zT, copy, 0.0) == 0.0);
    CHECK(zT.t == 0.0);
}

TEST_CASE("random initial states are deterministic in the seed") {
    Setup env(8, 0.01, 0.5, Nonlinearity::cubic(1.0));
    StateVector a = random_state(env.basis, env.quad, 99, 2.0);
    StateVector b = random_state(env.basis, env.quad, 99, 2.0);
    CHECK(state_distance(a, b, 0.0) == 0.0);
    CHECK(a.norm() == doctest::Approx(2.0).epsilon(1e-12));
    StateVector c = random_state(env.basis, env.quad, 100, 2.0);
    CHECK(state_distance(a, c, 0.0) > 0.0);

    StateVector r1 = simulate(std::move(a), env.basis, env.quad, env.params, env.scheme);
    StateVector r2 = simulate(std::move(b), env.basis, env.quad, env.params, env.scheme);
    CHECK(state_distance(r1, r2, 0.0) == 0.0);
}

TEST_CASE("total energy is nonincreasing along the flow") {
    Setup env(8, 0.01, 5.0, Nonlinearity::cubic(1.0));
    StateVector z0 = random_state(env.basis, env.quad, 7, 1.0);
    std::vector<double> energies;
    simulate(std::move(z0), env.basis, env.quad, env.params, env.scheme,
             [&](const StateVector& z) { energies.push_back(energy_E(z, env.params.f)); });
    REQUIRE(energies.size() > 100);
    for (std::size_t i = 1; i < energies.size(); ++i)
        CHECK(energies[i] <= energies[i - 1] + 1e-10 * std::abs(energies[0]));
}

TEST_CASE("decomposition splits linear and forced parts exactly") {
    SUBCASE("without forcing the compensating part vanishes") {
        Setup env(8, 0.01, 2.0, Nonlinearity::zero());
        StateVector z0 = random_state(env.basis, env.quad, 3, 1.0);
        DecomposeResult res = decompose(std::move(z0), env.basis, env.quad, env.params, env.scheme,
                                        [&](const StateVector& z, const StateVector& zd, const StateVector& zc) {
                                            CHECK(zc.norm() == 0.0);
                                            CHECK(state_distance(z, zd, 0.0) <= 1e-13);
                                        });
        CHECK(res.zc.norm() == 0.0);
    }
    SUBCASE("from rest with a forcing offset the linear part vanishes") {
        // f(0) = 1 forces the trajectory while the unforced linear part stays put
        Setup env(8, 0.01, 2.0, Nonlinearity({1.0, -4.0, 0.0, 1.0}));
        StateVector z0(env.basis, env.quad);
        DecomposeResult res = decompose(std::move(z0), env.basis, env.quad, env.params, env.scheme);
        CHECK(res.zd.norm() == 0.0);
        CHECK(res.zc.norm() > 0.0);
        CHECK(superposition_error(res.z, res.zd, res.zc) <= 1e-12);
    }
    SUBCASE("discrete superposition holds to roundoff on a nonlinear run") {
        Setup env(8, 0.01, 2.0, Nonlinearity::cubic(1.0));
        StateVector z0 = random_state(env.basis, env.quad, 11, 1.0);
        double worst = 0.0;
        decompose(std::move(z0), env.basis, env.quad, env.params, env.scheme,
                  [&](const StateVector& z, const StateVector& zd, const StateVector& zc) {
                      worst = std::max(worst, superposition_error(z, zd, zc));
                  });
        CHECK(worst <= 1e-11);
    }
}

TEST_CASE("single-mode oracle closed forms") {
    ModelParams params;
    params.f = Nonlinearity::zero();
    params.kernel = make_exponential(1.0, 1.0);

    SUBCASE("zero initial data stays zero") {
        std::vector<OracleState> path = single_mode_oracle(1.0, params, OracleState{}, 5.0, 0.1);
        for (const OracleState& s : path) {
            CHECK(s.u == 0.0);
            CHECK(s.v == 0.0);
            CHECK(s.theta == 0.0);
            CHECK(s.w == 0.0);
        }
    }
    SUBCASE("the damped mode decays below 1e-6 by t = 50") {
        OracleState z0;
        z0.u = 1.0;
        std::vector<OracleState> path = single_mode_oracle(1.0, params, z0, 50.0, 0.5);
        const OracleState& last = path.back();
        const double norm = std::sqrt(last.u * last.u + last.v * last.v + last.theta * last.theta + last.w * last.w);
        CHECK(norm <= 1e-6);
    }
    SUBCASE("the oracle Lyapunov energy is nonincreasing") {
        OracleState z0;
        z0.u = 1.0;
        z0.theta = -0.5;
        std::vector<OracleState> path = single_mode_oracle(2.0, params, z0, 20.0, 0.1);
        double prev = oracle_energy(2.0, params.kernel.kappa0, path.front());
        for (std::size_t i = 1; i < path.size(); ++i) {
            const double cur = oracle_energy(2.0, params.kernel.kappa0, path[i]);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
    SUBCASE("table kernels are rejected") {
        ModelParams bad = params;
        bad.kernel = make_table({0.0, 1.0, 2.0}, {1.0, 0.5, 0.2});
        CHECK_THROWS_AS(single_mode_oracle(1.0, bad, OracleState{}, 1.0, 0.1), std::invalid_argument);
    }
}

TEST_CASE("the modal stepper tracks the single-mode oracle") {
    const double dt = 1e-3;
    Setup env(1, dt, 2.0, Nonlinearity::zero());
    env.scheme.memory_rule = MemoryRule::AgeTrapezoid;
    env.scheme.sample_stride = 2000;
    StateVector z0(env.basis, env.quad);
    z0.u[0] = 1.0;
    StateVector zT = simulate(std::move(z0), env.basis, env.quad, env.params, env.scheme);

    OracleState o0;
    o0.u = 1.0;
    std::vector<OracleState> path = single_mode_oracle(env.basis.lambda(0), env.params, o0, 2.0, 2.0, 4000);
    const OracleState& ref = path.back();
    CHECK(std::abs(zT.u[0] - ref.u) <= 1e-5);
    CHECK(std::abs(zT.v[0] - ref.v) <= 1e-5);
    CHECK(std::abs(zT.theta[0] - ref.theta) <= 1e-5);
}

TEST_CASE("nearby trajectories separate at most exponentially") {
    Setup env(8, 0.01, 5.0, Nonlinearity::cubic(1.0));
    StateVector a = random_state(env.basis, env.quad, 21, 1.0);
    StateVector b = a;
    b.u[0] += 1e-6;
    const double d0 = state_distance(a, b, 0.0);
    StateVector aT = simulate(std::move(a), env.basis, env.quad, env.params, env.scheme);
    StateVector bT = simulate(std::move(b), env.basis, env.quad, env.params, env.scheme);
    CHECK(state_distance(aT, bT, 0.0) <= std::exp(1.0 * 5.0) * d0);
}

TEST_CASE("configuration errors are rejected up front") {
    ModalBasis basis = build_basis(DomainSpec::interval(M_PI, 4));
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.01, 1e-8);
    ModelParams params;

    SUBCASE("stepper step size must match the history spacing") {
        SchemeConfig cfg;
        cfg.dt = 0.02;
        CHECK_THROWS_AS(Stepper(basis, quad, params, cfg), std::invalid_argument);
    }
    SUBCASE("linear destabilizing forcing violates coercivity") {
        ModelParams bad;
        bad.f = Nonlinearity({0.0, -2.0}); // f(u) = -2u overwhelms the bending term
        CHECK_THROWS_AS(bad.validate(basis), std::invalid_argument);
    }
    SUBCASE("odd-degree positive leading coefficients pass automatically") {
        ModelParams ok;
        ok.f = Nonlinearity::cubic(4.0);
        CHECK_NOTHROW(ok.validate(basis));
    }
    SUBCASE("negative heat-law coefficients are rejected") {
        ModelParams bad;
        bad.c1 = -1.0;
        CHECK_THROWS_AS(bad.validate(basis), std::invalid_argument);
    }
    SUBCASE("distances require matching history grids") {
        KernelQuadrature other = build_quadrature(make_exponential(1.0, 1.0), 0.02, 1e-8);
        StateVector a(basis, quad), b(basis, other);
        CHECK_THROWS_AS(state_distance(a, b, 0.0), std::invalid_argument);
    }
}
