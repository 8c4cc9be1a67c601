// Time integration of the coupled plate / heat-with-memory system in the
// eigenbasis: per-mode implicit 3x3 solves for the stiff linear block, the
// nonlinearity explicit, the history advanced by exact shift. Also the
// z = z_D + z_C decomposition runner and the single-mode ODE oracle.
#pragma once

#include "platemem/history.hpp"
#include "platemem/kernel.hpp"
#include "platemem/spectral.hpp"
#include "platemem/stationary.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace platemem {

struct StateVector {
    SpectralField u, v, theta;
    HistoryField eta;
    double t = 0.0;

    StateVector(const ModalBasis& basis, const KernelQuadrature& quad)
        : u(basis), v(basis), theta(basis), eta(basis, quad) {}

    // product space norms: ||z||^2_{V^r} = ||u||^2_{V^{2+r}} + ||v||^2_{V^r}
    //                                     + ||theta||^2_{V^r} + ||eta||^2_{M^{1+r}}
    double norm_sq(double r = 0.0) const;
    double norm(double r = 0.0) const { return std::sqrt(norm_sq(r)); }
    bool finite_components() const { return u.finite() && v.finite() && theta.finite(); }
};

struct ModelParams {
    Nonlinearity f;
    MemoryKernel kernel = make_exponential(1.0, 1.0);
    double c1 = 0.0, c2 = 0.0, c3 = 0.0; // generalized heat-law coefficients

    void validate(const ModalBasis& basis) const; // coercivity margin, sign checks
};

enum class Scheme { Imex1, ImexCN };

// How the theta-row memory integral int mu eta ds is sampled on the age grid.
// PlainWeights pairs eta against the cell weights w_j (right endpoint); the
// resulting flow satisfies the discrete energy identity to the scheme's full
// order, but the right-endpoint sampling biases the integral by
// (dt/2) int mu(s) theta(t-s) ds — an O(dt) perturbation equivalent to
// inflating the kernel mass by (1 + delta dt/2). AgeTrapezoid pairs eta
// against (w_j + w_{j+1})/2 (a scalar factor (1 + r)/2 for geometric
// weights), removing that bias so trajectories track the continuous system
// at the scheme's order, at the price of an O(dt) floor in the accumulated
// energy-identity residual. The two cannot be had simultaneously because the
// identity's history functionals are fixed on the plain weights.
enum class MemoryRule { PlainWeights, AgeTrapezoid };

struct SchemeConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::Imex1;
    double total_time = 1.0;
    int sample_stride = 1;
    double tail_tol = 1e-8;
    MemoryRule memory_rule = MemoryRule::PlainWeights;
};

struct SimulationFailure : std::runtime_error {
    SimulationFailure(const std::string& msg, double time, int mode)
        : std::runtime_error(msg), t(time), mode(mode) {}
    double t;
    int mode;
};

// One time step is a per-mode linear solve with the memory integral treated
// semi-implicitly through the shift's affine structure and f(u) explicit
// (Imex1: frozen at u^n; ImexCN: at the extrapolated midpoint u^n + dt/2 v^n).
// The theta-row memory pairing follows SchemeConfig::memory_rule; norms and
// reported functionals always keep the plain weights.
class Stepper {
  public:
    Stepper(const ModalBasis& basis, const KernelQuadrature& quad, const ModelParams& params,
            const SchemeConfig& scheme);

    // the f(u) projection this scheme uses for the step leaving state z
    SpectralField forcing_projection(const StateVector& z) const;

    void step(StateVector& z) const; // forcing computed from z itself
    // forcing supplied by the caller (decomposition: z_C gets the full run's
    // forcing, z_D gets zero); the scheme is affine in (state, forcing)
    void step_forced(StateVector& z, const SpectralField& f_projection) const;

    const ModalBasis& basis() const { return *basis_; }
    const KernelQuadrature& quadrature() const { return *quad_; }

  private:
    const ModalBasis* basis_;
    const KernelQuadrature* quad_;
    ModelParams params_;
    SchemeConfig cfg_;
    // row-major 3x3 blocks per mode: inverse of the implicit matrix, and the
    // explicit half-step matrix (identity for Imex1)
    std::vector<double> implicit_inv_;
    std::vector<double> explicit_mat_;
    std::vector<double> mem_coupling_; // (lambda_k + c3) per mode
    double mem_scale_ = 1.0;    // (1 + r)/2 for geometric weights, else unused
    std::vector<double> trap_w_; // (w_j + w_{j+1})/2 for table kernels
    double trap_wsum_ = 0.0;     // sum of the trapezoid-in-age weights
};

using SampleCallback = std::function<void(const StateVector&)>;

// Deterministic trajectory; invokes on_sample at t = 0 and then every
// sample_stride steps (and at the final step). Throws SimulationFailure on
// NaN or on ||z|| exceeding 1e6 times the initial norm.
StateVector simulate(StateVector z0, const ModalBasis& basis, const KernelQuadrature& quad,
                     const ModelParams& params, const SchemeConfig& scheme,
                     const SampleCallback& on_sample = nullptr);

using DecomposeCallback = std::function<void(const StateVector& z, const StateVector& zd, const StateVector& zc)>;

struct DecomposeResult {
    StateVector z, zd, zc;
};

// Advances z' = Lz + G(z), z_D' = L z_D, z_C' = L z_C + G(z) in lockstep with
// the identical scheme; discrete superposition z = z_D + z_C holds to roundoff.
DecomposeResult decompose(StateVector z0, const ModalBasis& basis, const KernelQuadrature& quad,
                          const ModelParams& params, const SchemeConfig& scheme,
                          const DecomposeCallback& on_sample = nullptr);

// ||z_a - z_b||_{V^r} including the history component
double state_distance(const StateVector& a, const StateVector& b, double r = 0.0);
// max-deviation norm ||z - z_D - z_C||_{V^0}
double superposition_error(const StateVector& z, const StateVector& zd, const StateVector& zc);

// Closed 4-ODE reduction for a single mode, exponential kernel, f == 0:
//   u' = v, v' = -lambda v - lambda^2 u + lambda theta,
//   theta' = -lambda v - (lambda + c3) w - (c1 + c2 lambda) theta,
//   w' = kappa0 theta - delta w,
// integrated by classical RK4 at dt_out / substeps.
struct OracleState {
    double u = 0.0, v = 0.0, theta = 0.0, w = 0.0, t = 0.0;
};

std::vector<OracleState> single_mode_oracle(double lambda, const ModelParams& params, OracleState z0,
                                            double total_time, double dt_out, int substeps = 100);

// one-mode Lyapunov energy 0.5(lambda^2 u^2 + v^2 + theta^2) + lambda/(2 kappa0) w^2
double oracle_energy(double lambda, double kappa0, const OracleState& s);

// band-limited random state: modal amplitudes ~ N(0,1) * lambda_k^{-2},
// zero history, rescaled to the prescribed V^0 norm
StateVector random_state(const ModalBasis& basis, const KernelQuadrature& quad, std::uint64_t seed,
                         double v0_norm);

} // namespace platemem
