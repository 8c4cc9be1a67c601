#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "platemem/history.hpp"

#include <cmath>
#include <filesystem>
#include <vector>

using namespace platemem;

namespace {

ModalBasis make_basis(int n = 4) { return build_basis(DomainSpec::interval(M_PI, n)); }

SpectralField unit_mode(const ModalBasis& basis, int k, double a = 1.0) {
    SpectralField f(basis);
    f[k] = a;
    return f;
}

} // namespace

TEST_CASE("fresh history is identically zero") {
    ModalBasis basis = make_basis();
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.1, 1e-6);
    HistoryField eta(basis, quad);
    for (int j = 1; j <= quad.nodes; ++j)
        for (int k = 0; k < basis.mode_count(); ++k) CHECK(eta.node_value(j, k) == 0.0);
    CHECK(eta.m_norm(0.0) == 0.0);
    CHECK(eta.dissipation_pairing(1.0) == 0.0);
}

TEST_CASE("constant past temperature integrates to eta(s) = s theta") {
    ModalBasis basis = make_basis();
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.05, 1e-6);
    HistoryField eta(basis, quad);
    SpectralField psi = unit_mode(basis, 1, 0.7);
    eta.set_initial_past([&](double) { return psi; });
    for (int j = 1; j <= quad.nodes; ++j) {
        const double s = j * quad.ds;
        CHECK(eta.node_value(j, 1) == doctest::Approx(s * 0.7).epsilon(1e-13));
        CHECK(eta.node_value(j, 0) == 0.0);
    }
}

TEST_CASE("exponentially decaying past integrates to 1 - exp(-s) up to quadrature error") {
    ModalBasis basis = make_basis();
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.01, 1e-6);
    HistoryField eta(basis, quad);
    eta.set_initial_past([&](double s) { return unit_mode(basis, 0, std::exp(-s)); });
    for (int j = 1; j <= quad.nodes; ++j) {
        const double s = j * quad.ds;
        CHECK(eta.node_value(j, 0) == doctest::Approx(1.0 - std::exp(-s)).epsilon(1e-4));
    }
}

TEST_CASE("unit temperature accumulates eta(s) = min(s, elapsed time) exactly") {
    ModalBasis basis = make_basis();
    const double dt = 0.1;
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), dt, 1e-6);
    HistoryField eta(basis, quad);
    SpectralField one = unit_mode(basis, 0);
    const int steps = 25;
    for (int n = 0; n < steps; ++n) eta.advance(one, one, dt);
    for (int j = 1; j <= quad.nodes; ++j) {
        const double s = j * quad.ds;
        CHECK(eta.node_value(j, 0) == doctest::Approx(std::min(s, steps * dt)).epsilon(1e-13));
    }
}

TEST_CASE("linearly ramping temperature matches the closed-form history") {
    // theta(t) = t on the first mode: eta^t(s) = t s - s^2/2 for s <= t, and
    // the trapezoid deposit integrates linear data exactly
    ModalBasis basis = make_basis();
    const double dt = 0.05;
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), dt, 1e-6);
    HistoryField eta(basis, quad);
    const int steps = 40;
    for (int n = 0; n < steps; ++n)
        eta.advance(unit_mode(basis, 0, n * dt), unit_mode(basis, 0, (n + 1) * dt), dt);
    const double t = steps * dt;
    for (int j = 1; j <= quad.nodes; ++j) {
        const double s = j * quad.ds;
        if (s > t) continue;
        CHECK(eta.node_value(j, 0) == doctest::Approx(t * s - 0.5 * s * s).epsilon(1e-12));
    }
}

TEST_CASE("zero temperature shifts the profile and never grows the norm") {
    ModalBasis basis = make_basis();
    const double dt = 0.1;
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), dt, 1e-6);
    HistoryField eta(basis, quad);
    std::vector<SpectralField> init;
    for (int j = 1; j <= quad.nodes; ++j)
        init.push_back(unit_mode(basis, 0, std::sin(0.3 * j)));
    eta.set_initial_nodes(init);
    SpectralField zero(basis);
    double prev = eta.m_norm(0.0);
    for (int n = 1; n <= 30; ++n) {
        eta.advance(zero, zero, dt);
        // exact transport: node j now holds the initial value at age j - n
        for (int j = 1; j <= quad.nodes; ++j) {
            const double expect = j > n ? init[j - n - 1][0] : 0.0;
            CHECK(eta.node_value(j, 0) == doctest::Approx(expect).epsilon(1e-13));
        }
        const double cur = eta.m_norm(0.0);
        CHECK(cur <= prev + 1e-13);
        prev = cur;
    }
}

TEST_CASE("memory norm of a constant profile equals the retained kernel mass") {
    ModalBasis basis = make_basis();
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.05, 1e-8);
    HistoryField eta(basis, quad);
    // profile with unit V^r norm per node for r = 0 on mode 0 (lambda = 1)
    std::vector<SpectralField> init(quad.nodes, unit_mode(basis, 0));
    eta.set_initial_nodes(init);
    CHECK(eta.m_norm_sq(0.0) == doctest::Approx(1.0 - quad.tail_mass).epsilon(1e-13));
    CHECK(eta.m_norm_sq(1.0) == doctest::Approx(1.0 - quad.tail_mass).epsilon(1e-13));
}

TEST_CASE("memory norm of an exponential profile converges to the closed-form third") {
    // integral of e^{-s} e^{-2s} over (0, inf) = 1/3
    ModalBasis basis = make_basis();
    double err_coarse = 0.0, err_fine = 0.0;
    for (auto [ds, err] : {std::pair<double, double*>{0.02, &err_coarse}, {0.01, &err_fine}}) {
        KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), ds, 1e-10);
        HistoryField eta(basis, quad);
        std::vector<SpectralField> init;
        for (int j = 1; j <= quad.nodes; ++j) init.push_back(unit_mode(basis, 0, std::exp(-j * ds)));
        eta.set_initial_nodes(init);
        *err = std::abs(eta.m_norm_sq(0.0) - 1.0 / 3.0);
    }
    CHECK(err_coarse <= 0.02);
    CHECK(err_fine < err_coarse);
}

TEST_CASE("dissipation pairing is the exact exponential identity and nonpositive") {
    ModalBasis basis = make_basis();
    const double delta = 2.0;
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, delta), 0.05, 1e-8);
    HistoryField eta(basis, quad);
    std::vector<SpectralField> init;
    for (int j = 1; j <= quad.nodes; ++j) {
        SpectralField f(basis);
        for (int k = 0; k < basis.mode_count(); ++k) f[k] = std::cos(0.1 * j + k);
        init.push_back(f);
    }
    eta.set_initial_nodes(init);
    const double pairing = eta.dissipation_pairing(1.0);
    CHECK(pairing <= 0.0);
    CHECK(pairing == doctest::Approx(-0.5 * delta * eta.m_norm_sq(1.0)).epsilon(1e-12));
}

TEST_CASE("tail functional accounting") {
    ModalBasis basis = make_basis();
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.01, 1e-10);
    HistoryField eta(basis, quad);
    SUBCASE("zero history gives zero tail") {
        CHECK(eta.tail_functional(1.0) == 0.0);
        CHECK(eta.tail_functional(4.0) == 0.0);
    }
    SUBCASE("constant unit profile: y = 1 collects the full weighted mass") {
        std::vector<SpectralField> init(quad.nodes, unit_mode(basis, 0));
        eta.set_initial_nodes(init);
        CHECK(eta.tail_functional(1.0) ==
              doctest::Approx(eta.m_norm_sq(1.0) + quad.tail_mass).epsilon(1e-13));
    }
    SUBCASE("constant unit profile: y = 2 matches the split-range closed form") {
        std::vector<SpectralField> init(quad.nodes, unit_mode(basis, 0));
        eta.set_initial_nodes(init);
        const double expect = (1.0 - std::exp(-0.5)) + std::exp(-2.0);
        CHECK(std::abs(eta.tail_functional(2.0) - expect) <= 0.02);
    }
    SUBCASE("y below one is rejected") {
        CHECK_THROWS_AS(eta.tail_functional(0.5), std::invalid_argument);
    }
}

TEST_CASE("the stored history reproduces the depositing temperature series") {
    ModalBasis basis = make_basis();
    const double dt = 0.01;
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), dt, 1e-6);
    HistoryField eta(basis, quad);
    std::vector<SpectralField> series;
    auto theta_at = [&](double t) {
        SpectralField f(basis);
        f[0] = std::sin(3.0 * t);
        f[2] = std::cos(t) - 1.0;
        return f;
    };
    series.push_back(theta_at(0.0));
    const int steps = 100;
    for (int n = 0; n < steps; ++n) {
        eta.advance(theta_at(n * dt), theta_at((n + 1) * dt), dt);
        series.push_back(theta_at((n + 1) * dt));
    }

    SUBCASE("matched cadence agrees to roundoff") {
        CHECK(representation_check(eta, series, dt) <= 1e-12);
    }
    SUBCASE("doubled sampling cadence agrees to quadrature order") {
        std::vector<SpectralField> coarse;
        for (std::size_t i = 0; i < series.size(); i += 2) coarse.push_back(series[i]);
        const double dev = representation_check(eta, coarse, 2.0 * dt);
        CHECK(dev > 0.0);
        CHECK(dev <= 10.0 * dt * dt);
    }
}

TEST_CASE("snapshots round trip through disk") {
    namespace fs = std::filesystem;
    ModalBasis basis = make_basis();
    const double dt = 0.05;
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), dt, 1e-6);
    HistoryField eta(basis, quad);
    for (int n = 0; n < 20; ++n)
        eta.advance(unit_mode(basis, 1, std::sin(0.2 * n)), unit_mode(basis, 1, std::sin(0.2 * (n + 1))), dt);
    const fs::path path = fs::temp_directory_path() / "platemem_history_snapshot_test.bin";
    eta.save_snapshot(path.string());
    HistoryField back = HistoryField::load_snapshot(path.string(), basis, quad);
    for (int j = 1; j <= quad.nodes; ++j)
        for (int k = 0; k < basis.mode_count(); ++k)
            CHECK(back.node_value(j, k) == doctest::Approx(eta.node_value(j, k)).epsilon(1e-15));
    CHECK(back.m_norm_sq(1.0) == doctest::Approx(eta.m_norm_sq(1.0)).epsilon(1e-13));
    fs::remove(path);
}

TEST_CASE("advance validates its step size and initialization order") {
    ModalBasis basis = make_basis();
    KernelQuadrature quad = build_quadrature(make_exponential(1.0, 1.0), 0.1, 1e-6);
    HistoryField eta(basis, quad);
    SpectralField zero(basis);
    CHECK_THROWS_AS(eta.advance(zero, zero, 0.05), std::invalid_argument);
    eta.advance(zero, zero, 0.1);
    CHECK_THROWS_AS(eta.set_initial_past([&](double) { return zero; }), std::logic_error);
}
