#include "platemem/dynamics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <random>

namespace platemem {

double StateVector::norm_sq(double r) const {
    return v_norm_sq(u, 2.0 + r) + v_norm_sq(v, r) + v_norm_sq(theta, r) + eta.m_norm_sq(1.0 + r);
}

void ModelParams::validate(const ModalBasis& basis) const {
    if (!(kernel.total_mass() > 0.0))
        throw std::invalid_argument("ModelParams: kernel must carry positive total mass");
    if (c1 < 0.0 || c2 < 0.0 || c3 < 0.0)
        throw std::invalid_argument("ModelParams: heat-law coefficients must be nonnegative");
    // coercivity of f: automatic for an odd-degree leading term with positive
    // coefficient (f(s)/s -> +inf); otherwise require a positive sampled
    // margin beyond some threshold |s| >= s*
    const int deg = f.degree();
    const bool automatic = deg >= 2 && deg % 2 == 1 && f.coeffs()[deg] > 0.0;
    if (deg > 0 && !automatic) {
        bool ok = false;
        for (double s_star : {1.0, 10.0, 100.0, 1000.0})
            if (f.coercivity_margin(basis.c_omega(), s_star) > 0.0) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::invalid_argument("ModelParams: nonlinearity violates the coercivity condition "
                                        "liminf f(s)/s > -1/C_Omega");
    }
}

namespace {

// linear drift of one modal block, memory and nonlinearity excluded:
//   d/dt (u, v, theta) = B (u, v, theta)
Eigen::Matrix3d drift_matrix(double lambda, const ModelParams& p) {
    Eigen::Matrix3d b;
    b << 0.0, 1.0, 0.0,
        -lambda * lambda, -lambda, lambda,
        0.0, -lambda, -(p.c1 + p.c2 * lambda);
    return b;
}

} // namespace

Stepper::Stepper(const ModalBasis& basis, const KernelQuadrature& quad, const ModelParams& params,
                 const SchemeConfig& scheme)
    : basis_(&basis), quad_(&quad), params_(params), cfg_(scheme) {
    params_.validate(basis);
    if (!(cfg_.dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
    if (std::abs(cfg_.dt - quad.ds) > 1e-9 * quad.ds)
        throw std::invalid_argument("Stepper: dt must equal the history grid spacing ds");

    const int n = basis.mode_count();
    const double dt = cfg_.dt;
    const double imp_w = (cfg_.scheme == Scheme::Imex1) ? dt : 0.5 * dt; // implicit weight

    const bool trapezoid = cfg_.memory_rule == MemoryRule::AgeTrapezoid;
    if (quad.geometric) {
        mem_scale_ = trapezoid ? 0.5 * (1.0 + quad.ratio) : 1.0;
        trap_wsum_ = mem_scale_ * quad.weight_sum();
    } else {
        trap_w_.resize(quad.nodes);
        for (int j = 0; j < quad.nodes; ++j)
            trap_w_[j] = trapezoid
                             ? 0.5 * (quad.w[j] + (j + 1 < quad.nodes ? quad.w[j + 1] : 0.0))
                             : quad.w[j];
        trap_wsum_ = std::accumulate(trap_w_.begin(), trap_w_.end(), 0.0);
    }

    implicit_inv_.resize(static_cast<std::size_t>(n) * 9);
    explicit_mat_.resize(static_cast<std::size_t>(n) * 9);
    mem_coupling_.resize(n);
    for (int k = 0; k < n; ++k) {
        const double lam = basis.lambda(k);
        mem_coupling_[k] = lam + params_.c3;
        const Eigen::Matrix3d b = drift_matrix(lam, params_);
        Eigen::Matrix3d lhs = Eigen::Matrix3d::Identity() - imp_w * b;
        // the theta^{n+1} part of the semi-implicit memory integral
        lhs(2, 2) += imp_w * mem_coupling_[k] * trap_wsum_ * 0.5 * dt;
        const Eigen::Matrix3d inv = lhs.inverse();
        const Eigen::Matrix3d exp_mat = (cfg_.scheme == Scheme::Imex1)
                                            ? Eigen::Matrix3d::Identity()
                                            : Eigen::Matrix3d(Eigen::Matrix3d::Identity() + 0.5 * dt * b);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                implicit_inv_[static_cast<std::size_t>(k) * 9 + 3 * r + c] = inv(r, c);
                explicit_mat_[static_cast<std::size_t>(k) * 9 + 3 * r + c] = exp_mat(r, c);
            }
    }
}

SpectralField Stepper::forcing_projection(const StateVector& z) const {
    if (params_.f.degree() == 0 && params_.f.f(0.0) == 0.0) return SpectralField(*basis_);
    if (cfg_.scheme == Scheme::Imex1) return project_f(z.u, params_.f);
    SpectralField mid = z.u;
    for (int k = 0; k < mid.size(); ++k) mid[k] += 0.5 * cfg_.dt * z.v[k];
    return project_f(mid, params_.f);
}

void Stepper::step(StateVector& z) const { step_forced(z, forcing_projection(z)); }

void Stepper::step_forced(StateVector& z, const SpectralField& f_projection) const {
    const int n = basis_->mode_count();
    const double dt = cfg_.dt;
    const double kg = trap_wsum_;
    const bool cn = cfg_.scheme == Scheme::ImexCN;

    // trapezoid-in-age memory integral and its one-cell shift
    std::vector<double> ss, mem;
    if (quad_->geometric) {
        z.eta.shifted_memory_sum(ss);
        mem = z.eta.memory_integral();
        for (int k = 0; k < n; ++k) {
            ss[k] *= mem_scale_;
            mem[k] *= mem_scale_;
        }
    } else {
        ss.assign(n, 0.0);
        mem.assign(n, 0.0);
        for (int j = 1; j <= quad_->nodes; ++j) {
            const double wj = trap_w_[j - 1];
            const double wj1 = (j < quad_->nodes) ? trap_w_[j] : 0.0; // weight of the shifted slot
            for (int k = 0; k < n; ++k) {
                const double v = z.eta.node_value(j, k);
                mem[k] += wj * v;
                ss[k] += wj1 * v;
            }
        }
    }

    const SpectralField theta_old = z.theta;
    for (int k = 0; k < n; ++k) {
        const double* em = &explicit_mat_[static_cast<std::size_t>(k) * 9];
        const double* iv = &implicit_inv_[static_cast<std::size_t>(k) * 9];
        const double x0 = z.u[k], x1 = z.v[k], x2 = z.theta[k];

        double r0 = em[0] * x0 + em[1] * x1 + em[2] * x2;
        double r1 = em[3] * x0 + em[4] * x1 + em[5] * x2;
        double r2 = em[6] * x0 + em[7] * x1 + em[8] * x2;

        r1 -= dt * f_projection[k];
        // memory drag: fully at the new level (Imex1) or trapezoid (ImexCN);
        // the theta^{n+1} contribution already sits in the implicit matrix
        const double known_mem = cn ? 0.5 * (mem[k] + ss[k] + kg * 0.5 * dt * x2)
                                    : ss[k] + kg * 0.5 * dt * x2;
        r2 -= dt * mem_coupling_[k] * known_mem;

        z.u[k] = iv[0] * r0 + iv[1] * r1 + iv[2] * r2;
        z.v[k] = iv[3] * r0 + iv[4] * r1 + iv[5] * r2;
        z.theta[k] = iv[6] * r0 + iv[7] * r1 + iv[8] * r2;
    }
    z.eta.advance(theta_old, z.theta, dt);
    z.t += dt;
}

namespace {

int first_bad_mode(const StateVector& z) {
    for (int k = 0; k < z.u.size(); ++k)
        if (!std::isfinite(z.u[k]) || !std::isfinite(z.v[k]) || !std::isfinite(z.theta[k])) return k;
    return -1;
}

long step_count(const SchemeConfig& cfg) {
    const long n = std::lround(cfg.total_time / cfg.dt);
    if (n < 0 || (n == 0 && cfg.total_time > 0.0))
        throw std::invalid_argument("SchemeConfig: total_time must be zero or cover a whole step");
    return n; // n == 0 is a valid empty run: the initial sample only
}

} // namespace

StateVector simulate(StateVector z0, const ModalBasis& basis, const KernelQuadrature& quad,
                     const ModelParams& params, const SchemeConfig& scheme,
                     const SampleCallback& on_sample) {
    Stepper stepper(basis, quad, params, scheme);
    const long steps = step_count(scheme);
    const long stride = std::max(scheme.sample_stride, 1);
    const double guard = 1e6 * std::max(z0.norm(), 1.0);

    if (on_sample) on_sample(z0);
    for (long i = 1; i <= steps; ++i) {
        stepper.step(z0);
        if (!z0.finite_components())
            throw SimulationFailure("simulate: non-finite state", z0.t, first_bad_mode(z0));
        if (i % stride == 0 || i == steps) {
            if (z0.norm() > guard)
                throw SimulationFailure("simulate: norm blow-up beyond 1e6 x initial", z0.t, -1);
            if (on_sample && (i % stride == 0 || i == steps)) on_sample(z0);
        }
    }
    return z0;
}

DecomposeResult decompose(StateVector z0, const ModalBasis& basis, const KernelQuadrature& quad,
                          const ModelParams& params, const SchemeConfig& scheme,
                          const DecomposeCallback& on_sample) {
    Stepper stepper(basis, quad, params, scheme);
    const long steps = step_count(scheme);
    const long stride = std::max(scheme.sample_stride, 1);
    const double guard = 1e6 * std::max(z0.norm(), 1.0);

    DecomposeResult res{z0, z0, StateVector(basis, quad)};
    const SpectralField zero(basis);

    if (on_sample) on_sample(res.z, res.zd, res.zc);
    for (long i = 1; i <= steps; ++i) {
        const SpectralField fk = stepper.forcing_projection(res.z);
        stepper.step_forced(res.z, fk);
        stepper.step_forced(res.zc, fk);
        stepper.step_forced(res.zd, zero);
        if (!res.z.finite_components() || !res.zd.finite_components() || !res.zc.finite_components())
            throw SimulationFailure("decompose: non-finite state", res.z.t, first_bad_mode(res.z));
        if (i % stride == 0 || i == steps) {
            if (res.z.norm() > guard)
                throw SimulationFailure("decompose: norm blow-up beyond 1e6 x initial", res.z.t, -1);
            if (on_sample) on_sample(res.z, res.zd, res.zc);
        }
    }
    return res;
}

namespace {

double history_diff_norm_sq(const HistoryField& a, const HistoryField& b, double r) {
    const KernelQuadrature& quad = a.quadrature();
    if (b.nodes() != a.nodes() || b.modes() != a.modes())
        throw std::invalid_argument("state_distance: history grids do not match");
    const ModalBasis& basis = a.basis();
    double acc = 0.0;
    for (int j = 1; j <= quad.nodes; ++j) {
        double row = 0.0;
        for (int k = 0; k < a.modes(); ++k) {
            const double d = a.node_value(j, k) - b.node_value(j, k);
            row += std::pow(basis.lambda(k), r) * d * d;
        }
        acc += quad.w[j - 1] * row;
    }
    return acc;
}

} // namespace

double state_distance(const StateVector& a, const StateVector& b, double r) {
    double acc = v_norm_sq(a.u - b.u, 2.0 + r) + v_norm_sq(a.v - b.v, r) +
                 v_norm_sq(a.theta - b.theta, r);
    acc += history_diff_norm_sq(a.eta, b.eta, 1.0 + r);
    return std::sqrt(acc);
}

double superposition_error(const StateVector& z, const StateVector& zd, const StateVector& zc) {
    double acc = v_norm_sq(z.u - zd.u - zc.u, 2.0) + v_norm_sq(z.v - zd.v - zc.v, 0.0) +
                 v_norm_sq(z.theta - zd.theta - zc.theta, 0.0);
    const KernelQuadrature& quad = z.eta.quadrature();
    const ModalBasis& basis = z.eta.basis();
    for (int j = 1; j <= quad.nodes; ++j) {
        double row = 0.0;
        for (int k = 0; k < z.eta.modes(); ++k) {
            const double d =
                z.eta.node_value(j, k) - zd.eta.node_value(j, k) - zc.eta.node_value(j, k);
            row += basis.lambda(k) * d * d;
        }
        acc += quad.w[j - 1] * row;
    }
    return std::sqrt(acc);
}

std::vector<OracleState> single_mode_oracle(double lambda, const ModelParams& params, OracleState z0,
                                            double total_time, double dt_out, int substeps) {
    if (params.kernel.kind != KernelKind::Exponential)
        throw std::invalid_argument("single_mode_oracle: requires an exponential kernel");
    if (substeps < 1) throw std::invalid_argument("single_mode_oracle: substeps must be >= 1");
    const double kappa0 = params.kernel.kappa0;
    const double delta = params.kernel.delta;
    const double damp = params.c1 + params.c2 * lambda;
    const double couple = lambda + params.c3;

    auto rhs = [&](const std::array<double, 4>& x) {
        return std::array<double, 4>{
            x[1],
            -lambda * x[1] - lambda * lambda * x[0] + lambda * x[2],
            -lambda * x[1] - couple * x[3] - damp * x[2],
            kappa0 * x[2] - delta * x[3],
        };
    };

    const long outputs = std::lround(total_time / dt_out);
    const double h = dt_out / substeps;
    std::array<double, 4> x{z0.u, z0.v, z0.theta, z0.w};
    std::vector<OracleState> out;
    out.reserve(outputs + 1);
    out.push_back(z0);
    for (long i = 1; i <= outputs; ++i) {
        for (int s = 0; s < substeps; ++s) {
            const auto k1 = rhs(x);
            std::array<double, 4> tmp;
            for (int q = 0; q < 4; ++q) tmp[q] = x[q] + 0.5 * h * k1[q];
            const auto k2 = rhs(tmp);
            for (int q = 0; q < 4; ++q) tmp[q] = x[q] + 0.5 * h * k2[q];
            const auto k3 = rhs(tmp);
            for (int q = 0; q < 4; ++q) tmp[q] = x[q] + h * k3[q];
            const auto k4 = rhs(tmp);
            for (int q = 0; q < 4; ++q)
                x[q] += (h / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        out.push_back({x[0], x[1], x[2], x[3], z0.t + i * dt_out});
    }
    return out;
}

double oracle_energy(double lambda, double kappa0, const OracleState& s) {
    return 0.5 * (lambda * lambda * s.u * s.u + s.v * s.v + s.theta * s.theta) +
           (lambda / (2.0 * kappa0)) * s.w * s.w;
}

StateVector random_state(const ModalBasis& basis, const KernelQuadrature& quad, std::uint64_t seed,
                         double v0_norm) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateVector z(basis, quad);
    for (int k = 0; k < basis.mode_count(); ++k) {
        const double decay = 1.0 / (basis.lambda(k) * basis.lambda(k));
        z.u[k] = gauss(rng) * decay;
        z.v[k] = gauss(rng) * decay;
        z.theta[k] = gauss(rng) * decay;
    }
    const double n0 = z.norm();
    if (n0 > 0.0 && v0_norm > 0.0) {
        const double a = v0_norm / n0;
        z.u *= a;
        z.v *= a;
        z.theta *= a;
    }
    return z;
}

} // namespace platemem
