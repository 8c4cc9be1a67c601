// Memory kernel mu = -kappa', validation of the admissibility assumptions,
// and exact cell-integral quadrature weights for mu-weighted integrals.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace platemem {

enum class KernelKind { Exponential, Table };

struct MemoryKernel {
    KernelKind kind = KernelKind::Exponential;

    // exponential: mu(s) = kappa0 * delta * exp(-delta s)
    double kappa0 = 1.0;
    double delta = 1.0;

    // table: sampled (s, mu) with strictly increasing s; mu' by finite differences
    std::vector<double> s;
    std::vector<double> mu;
    std::vector<double> mu_prime;

    double value(double x) const;
    double derivative(double x) const;
    // total mass over [0, inf); exact for exponential, trapezoid over the
    // sampled range for tables
    double total_mass() const;
};

MemoryKernel make_exponential(double kappa0, double delta);
MemoryKernel make_table(std::vector<double> s, std::vector<double> mu);
// two-column whitespace-separated text file (s, mu(s)), strictly increasing s
MemoryKernel load_table(const std::string& path);

struct AssumptionCheck {
    bool pass = false;
    double margin = 0.0; // worst-case margin; sign convention per assumption
    int worst_node = -1; // grid index where the margin is attained
};

struct AssumptionReport {
    AssumptionCheck h1; // mu in W^{1,1}: mu and mu' integrable on the grid
    AssumptionCheck h2; // mu >= 0 and mu' <= 0
    AssumptionCheck h3; // mu' + delta mu <= 0 for some delta > 0
    AssumptionCheck h4; // total mass kappa0 > 0
    double h3_delta = 0.0; // delta used (given, or largest passing candidate)
    bool all_pass() const { return h1.pass && h2.pass && h3.pass && h4.pass; }
};

// Evaluates (H1)-(H4) on the given s-grid. If the kernel carries no delta
// (table kind), sweeps a logarithmic candidate grid and reports the largest
// delta that passes, or failure when none does.
AssumptionReport verify_assumptions(const MemoryKernel& kernel, const std::vector<double>& s_grid);

struct KernelQuadrature {
    double ds = 0.0;       // node spacing, equal to the integrator step
    int nodes = 0;         // M; node j (1-based) sits at s_j = j * ds
    double horizon = 0.0;  // M * ds
    double kappa0 = 0.0;
    double tail_mass = 0.0;
    std::vector<double> w;       // w_j = integral of mu over ((j-1) ds, j ds]
    std::vector<double> w_prime; // same cell integrals of mu'
    // geometric structure of exponential weights: w_{j+1} = ratio * w_j
    bool geometric = false;
    double ratio = 0.0;

    double weight_sum() const;
    double s_node(int j) const { return (j + 1) * ds; } // j is 0-based internally
};

// M is the smallest node count with tail mass <= tail_tol. Exponential
// kernels use closed-form cell integrals; table kernels integrate the
// piecewise-linear interpolant and treat mass beyond the table as tail.
KernelQuadrature build_quadrature(const MemoryKernel& kernel, double ds, double tail_tol);

} // namespace platemem
