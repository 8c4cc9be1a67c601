// Scalar functionals of the flow (total energy, the perturbed Lyapunov
// functionals, memory pairings), per-step dissipation residuals, decay-rate
// fits, the gradient-inequality exponent probe, and the absorbing-set and
// coefficient audits.
#pragma once

#include "platemem/dynamics.hpp"

#include <vector>

namespace platemem {

// coefficients of the perturbed Lyapunov functional H
struct FunctionalConfig {
    double alpha = 0.25;
    double eps = 0.0625;
    int transient_samples = 0; // H monotonicity asserted beyond this index
};

struct EnergySample {
    double t = 0.0;
    double E = 0.0;
    double H = 0.0;
    double J = 0.0;
    double norm_v = 0.0;
    double norm_theta = 0.0;
    double norm_eta_M1 = 0.0;
    double grad_v_sq = 0.0; // ||A^{1/2} v||^2
    double pairing = 0.0;   // (1/2) int mu' ||A^{1/2} eta||^2 ds  (<= 0)
    double dissipation_residual = 0.0;
    double stat_residual = 0.0; // ||A^2 u + f(u)||_{V^{-2}}
    double energy_u = 0.0;      // (1/2)||Au||^2 + int F(u)
    double dist_V0 = 0.0;       // ||z - z_inf||_{V^0}; NaN without a target
    double dist_u_V2 = 0.0;     // ||u - u_inf||_{V^2}; NaN without a target
};

// total energy E = (1/2)||z||^2_{V^0} + int F(u)
double energy_E(const StateVector& z, const Nonlinearity& f);

// J = -int mu <theta, eta(s)> ds   (V^0 pairing)
double functional_J(const StateVector& z);
// J_C = -int mu <A^{1/2} theta, A^{1/2} eta(s)> ds   (V^1 pairing)
double functional_J1(const StateVector& z);

// H = (1/2)||v||^2 + (1/2)||theta||^2 + (1/2)||eta||^2_{M^1} + E(u)
//     + alpha J + eps <A^2 u + f(u), v>_{V^{-2}}
double functional_H(const StateVector& z, const Nonlinearity& f, const FunctionalConfig& cfg);

// Psi = (1/2)||z||^2_{V^0} + (eps^2/2)||grad u||^2 + int F(u)
//       + eps^2 int u v + 2 eps J
double functional_Psi(const StateVector& z, const Nonlinearity& f, double eps);

// Phi = ||A^{1/2} z_C||^2_{V^0} + 2 int f(u) A u_C + 2 eps^2 int v_C A u_C
//       + eps^2 ||A u_C||^2 + 4 eps J_C + k    (u from the full trajectory)
double functional_Phi(const StateVector& zc, const SpectralField& u_full, const Nonlinearity& f,
                      double eps, double k);

// y = (1/2)||u - u_inf||^2_{V^2} + (1/2)||v||^2 + (1/2)||theta||^2
//     + (1/2)||eta||^2_{M^1} + (eps^2/2)||grad(u - u_inf)||^2
//     + int (F(u) - F(u_inf) - f(u_inf)(u - u_inf)) + eps^2 int v (u - u_inf)
//     + 2 eps J
double functional_y(const StateVector& z, const SpectralField& u_inf, const Nonlinearity& f, double eps);

// Upsilon = ||A^{1/2}(z_C - z_inf)||^2_{V^0}
//           + 2 int (f(u) - f(u_inf)) A(u_C - u_inf) + 2 eps^2 int v_C A(u_C - u_inf)
//           + eps^2 ||A(u_C - u_inf)||^2 + 4 eps J_C
double functional_Upsilon(const StateVector& zc, const SpectralField& u_full,
                          const SpectralField& u_inf, const Nonlinearity& f, double eps);

// one fully evaluated sample; distances filled when a target is given
EnergySample make_sample(const StateVector& z, const Nonlinearity& f, const FunctionalConfig& cfg,
                         const SpectralField* u_inf = nullptr);

struct ResidualReport {
    double max_abs = 0.0;
    double total_abs = 0.0;
};

// Per-step residual of the energy identity dE/dt + ||grad v||^2
// - (1/2) int mu' ||A^{1/2} eta||^2 = 0: R_n = E_{n+1} - E_n + dt * D with D
// at the right endpoint (Imex1) or the trapezoid average (ImexCN). Samples
// must be at every step; fills sample.dissipation_residual in place.
ResidualReport dissipation_residual(std::vector<EnergySample>& samples, double dt, Scheme scheme);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// ordinary least squares y = slope x + intercept with determination coefficient
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct RateFit {
    double p = 0.0;           // decay exponent of (1 + t)^{-p}
    double prefactor = 0.0;   // C in C (1 + t)^{-p}
    double r2_poly = 0.0;
    double rate = 0.0;        // r in C exp(-r t)
    double prefactor_exp = 0.0;
    double r2_exp = 0.0;
    double t_a = 0.0, t_b = 0.0;
    double rho_hat = 0.0; // p / (1 + 2p), the exponent implied by p
    bool exponential_wins = false;
};

// Fits log(value) against log(1 + t) and against t on [t_a, t_b] and reports
// which model carries the higher determination coefficient. Throws on
// nonpositive values or fewer than three points in the window.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& value, double t_a, double t_b);

struct LojasiewiczProbe {
    double sigma = 0.0;   // fitted slope of log(residual) vs log(energy gap)
    double rho_hat = 0.0; // 1 - sigma, clipped to (0, 1/2]
    double r2 = 0.0;
    int samples_used = 0;
    double constant = 0.0;        // largest beta with residual >= beta gap^{1-rho_hat}
    double worst_violation = 0.0; // sample-wise slack of the inequality (0 = tight)
};

// Gradient-inequality exponent from the tail of a converging run:
// residual >= constant * |energy gap|^{1 - rho}. Throws when fewer than three
// samples carry positive gap and residual.
LojasiewiczProbe ls_probe(const std::vector<double>& energy_gap, const std::vector<double>& stat_residual,
                          double tail_fraction = 0.5);

struct AbsorbingEntry {
    double entry_time = 0.0;
    double post_entry_sup = 0.0;
};

struct AbsorbingAudit {
    double radius = 0.0; // smallest common ball entered without re-exit
    std::vector<AbsorbingEntry> entries;
    int violations = 0; // re-exits at the reported radius (0 by construction)
};

// norm_series[i][n] = ||z_i(t_n)||_{V^0} on a shared time grid
AbsorbingAudit absorbing_audit(const std::vector<std::vector<double>>& norm_series,
                               const std::vector<double>& times);

// everything needed to evaluate H for arbitrary (alpha, eps) after the run
struct HProbeSample {
    double t = 0.0;
    double base = 0.0;    // (1/2)(||v||^2 + ||theta||^2 + ||eta||^2_{M^1}) + E(u)
    double J = 0.0;       // memory pairing term
    double pairing = 0.0; // <A^2 u + f(u), v>_{V^{-2}}
};

HProbeSample h_probe(const StateVector& z, const Nonlinearity& f);

// Starts at (alpha, eps) = (1/4, 1/16) and halves both until H is
// nonincreasing (1e-10 relative slack) beyond the first 5% of the probe.
// Throws std::runtime_error when no pair down to 2^{-20} works.
FunctionalConfig coefficient_audit(const std::vector<HProbeSample>& probe);

} // namespace platemem
