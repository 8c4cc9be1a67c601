// Polynomial nonlinearities with admissibility checks, the Newton solver for
// the hinged biharmonic equilibrium problem A^2 u + f(u) = 0, residual norms
// in V^{-2}, and equilibrium classification.
#pragma once

#include "platemem/spectral.hpp"

#include <string>
#include <vector>

namespace platemem {

// f given by ascending polynomial coefficients; F is the antiderivative with
// F(0) = 0 and f' the derivative, both held at coefficient level.
class Nonlinearity {
  public:
    Nonlinearity() : coeff_{0.0} {}
    explicit Nonlinearity(std::vector<double> ascending_coeffs);
    // f(u) = u^3 - beta u
    static Nonlinearity cubic(double beta);
    static Nonlinearity zero() { return Nonlinearity(); }

    double f(double s) const;
    double df(double s) const;
    double F(double s) const; // antiderivative, F(0) = 0
    int degree() const;
    bool analytic() const { return true; } // polynomials are entire
    const std::vector<double>& coeffs() const { return coeff_; }

    PointwiseFunction as_pointwise() const;
    PointwiseFunction derivative_pointwise() const;

    // min over |s| in [s_star, s_max] of f(s)/s + 1/C_Omega, sampled on a
    // log grid; positive margin realizes the coercivity assumption
    double coercivity_margin(double c_omega, double s_star = 1.0, double s_max = 1e4) const;

  private:
    std::vector<double> coeff_;
};

// dealiased modal projection of f(u)
SpectralField project_f(const SpectralField& u, const Nonlinearity& f);

// || A^2 u + f(u) ||_{V^{-2}} with the dealiased projection of f
double stationarity_residual(const SpectralField& u, const Nonlinearity& f);

// (1/2)||u||_{V^2}^2 + collocation quadrature of F(u)
double energy_of_u(const SpectralField& u, const Nonlinearity& f);

struct Equilibrium {
    SpectralField u;
    double residual = 0.0;              // V^{-2} stationarity residual
    std::vector<double> spectrum;       // eigenvalues of A^2 + f'(u), ascending
    bool nondegenerate = false;
    bool local_minimizer = false;
    int newton_iterations = 0;
    std::vector<double> contraction_ratios; // residual_{n+1} / residual_n^2
};

struct NewtonOptions {
    double tolerance = 1e-11;
    int max_iterations = 50;
    double degeneracy_tol = 1e-8; // |spectrum| below this flags degeneracy
};

// Thrown when Newton fails to reach the tolerance.
struct NewtonFailure : std::runtime_error {
    explicit NewtonFailure(const std::string& msg) : std::runtime_error(msg) {}
};
// Thrown when the Jacobian is singular (degenerate equilibrium direction).
struct SingularJacobian : std::runtime_error {
    explicit SingularJacobian(const std::string& msg) : std::runtime_error(msg) {}
};

Equilibrium solve_steady(const ModalBasis& basis, const Nonlinearity& f, const SpectralField& guess,
                         const NewtonOptions& opts = {});

// recomputes spectrum / flags for a given state without solving
Equilibrium classify(const ModalBasis& basis, const Nonlinearity& f, const SpectralField& u,
                     double degeneracy_tol = 1e-8);

std::string equilibrium_to_json(const Equilibrium& eq);

// default guess list: zero and +/- multiples (1, 2) of the first eigenfunction
std::vector<SpectralField> default_steady_guesses(const ModalBasis& basis);

// Runs Newton from every guess, keeps the successes, and deduplicates by V^2
// distance <= 1e-6. Throws NewtonFailure when every attempt fails.
std::vector<Equilibrium> steady_sweep(const ModalBasis& basis, const Nonlinearity& f,
                                      const std::vector<SpectralField>& guesses,
                                      const NewtonOptions& opts = {});

} // namespace platemem
