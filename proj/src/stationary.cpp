#include "platemem/stationary.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace platemem {

Nonlinearity::Nonlinearity(std::vector<double> ascending_coeffs) : coeff_(std::move(ascending_coeffs)) {
    if (coeff_.empty()) coeff_.push_back(0.0);
}

Nonlinearity Nonlinearity::cubic(double beta) { return Nonlinearity({0.0, -beta, 0.0, 1.0}); }

double Nonlinearity::f(double s) const {
    double acc = 0.0;
    for (std::size_t i = coeff_.size(); i-- > 0;) acc = acc * s + coeff_[i];
    return acc;
}

double Nonlinearity::df(double s) const {
    double acc = 0.0;
    for (std::size_t i = coeff_.size(); i-- > 1;) acc = acc * s + coeff_[i] * static_cast<double>(i);
    return acc;
}

double Nonlinearity::F(double s) const {
    double acc = 0.0;
    for (std::size_t i = coeff_.size(); i-- > 0;) acc = acc * s + coeff_[i] / static_cast<double>(i + 1);
    return acc * s;
}

int Nonlinearity::degree() const {
    for (std::size_t i = coeff_.size(); i-- > 0;)
        if (coeff_[i] != 0.0) return static_cast<int>(i);
    return 0;
}

PointwiseFunction Nonlinearity::as_pointwise() const {
    return {[*this](double s) { return f(s); }, std::max(degree(), 1)};
}

PointwiseFunction Nonlinearity::derivative_pointwise() const {
    return {[*this](double s) { return df(s); }, std::max(degree() - 1, 1)};
}

double Nonlinearity::coercivity_margin(double c_omega, double s_star, double s_max) const {
    double worst = std::numeric_limits<double>::infinity();
    for (double s = s_star; s <= s_max * (1.0 + 1e-12); s *= 1.1) {
        worst = std::min(worst, f(s) / s + 1.0 / c_omega);
        worst = std::min(worst, f(-s) / (-s) + 1.0 / c_omega);
    }
    return worst;
}

SpectralField project_f(const SpectralField& u, const Nonlinearity& f) {
    return evaluate_nonlinearity(u, f.as_pointwise());
}

double stationarity_residual(const SpectralField& u, const Nonlinearity& f) {
    const ModalBasis& b = u.basis();
    const SpectralField fu = project_f(u, f);
    double acc = 0.0;
    for (int k = 0; k < u.size(); ++k) {
        const double lam = b.lambda(k);
        const double rk = lam * lam * u[k] + fu[k];
        acc += rk * rk / (lam * lam);
    }
    return std::sqrt(acc);
}

double energy_of_u(const SpectralField& u, const Nonlinearity& f) {
    return 0.5 * v_norm_sq(u, 2.0) + quadrature_of(u, [&](double s) { return f.F(s); });
}

namespace {

// modal matrix of A^2 + f'(u): diag(lambda^2) plus the collocation assembly
// of multiplication by f'(u)
Eigen::MatrixXd linearization_matrix(const ModalBasis& b, const Nonlinearity& f, const SpectralField& u) {
    const int n = b.mode_count();
    const int g = b.grid_size();
    std::vector<double> nodal;
    b.to_grid(u.coeffs(), nodal);
    for (double& x : nodal) x = f.df(x);
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            double acc = 0.0;
            for (int i = 0; i < g; ++i)
                acc += b.grid_weight(i) * b.eigenfunction(k, i) * nodal[i] * b.eigenfunction(l, i);
            mat(k, l) = acc;
            mat(l, k) = acc;
        }
    for (int k = 0; k < n; ++k) mat(k, k) += b.lambda(k) * b.lambda(k);
    return mat;
}

void fill_spectrum(Equilibrium& eq, const ModalBasis& b, const Nonlinearity& f, double tol) {
    Eigen::MatrixXd mat = linearization_matrix(b, f, eq.u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
    eq.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    double min_abs = std::numeric_limits<double>::infinity();
    bool all_pos = true;
    for (double s : eq.spectrum) {
        min_abs = std::min(min_abs, std::abs(s));
        all_pos = all_pos && s > tol;
    }
    eq.nondegenerate = min_abs > tol;
    eq.local_minimizer = all_pos;
}

} // namespace

Equilibrium solve_steady(const ModalBasis& basis, const Nonlinearity& f, const SpectralField& guess,
                         const NewtonOptions& opts) {
    if (!guess.finite()) throw std::invalid_argument("solve_steady: guess is not finite");
    if (!(opts.tolerance > 0.0)) throw std::invalid_argument("solve_steady: tolerance must be positive");

    const int n = basis.mode_count();
    Equilibrium eq;
    eq.u = guess;

    auto residual_vec = [&](const SpectralField& u) {
        SpectralField fu = project_f(u, f);
        Eigen::VectorXd r(n);
        for (int k = 0; k < n; ++k)
            r(k) = basis.lambda(k) * basis.lambda(k) * u[k] + fu[k];
        return r;
    };

    double prev_res = stationarity_residual(eq.u, f);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (prev_res <= opts.tolerance) break;
        Eigen::MatrixXd jac = linearization_matrix(basis, f, eq.u);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible())
            throw SingularJacobian("solve_steady: singular Jacobian (degenerate equilibrium)");
        Eigen::VectorXd step = lu.solve(residual_vec(eq.u));
        for (int k = 0; k < n; ++k) eq.u[k] -= step(k);
        ++eq.newton_iterations;
        const double res = stationarity_residual(eq.u, f);
        if (prev_res > 0.0) eq.contraction_ratios.push_back(res / (prev_res * prev_res));
        prev_res = res;
    }
    if (prev_res > opts.tolerance)
        throw NewtonFailure("solve_steady: no convergence after " + std::to_string(opts.max_iterations) +
                            " iterations, residual " + std::to_string(prev_res));
    eq.residual = prev_res;
    fill_spectrum(eq, basis, f, opts.degeneracy_tol);
    return eq;
}

Equilibrium classify(const ModalBasis& basis, const Nonlinearity& f, const SpectralField& u,
                     double degeneracy_tol) {
    Equilibrium eq;
    eq.u = u;
    eq.residual = stationarity_residual(u, f);
    fill_spectrum(eq, basis, f, degeneracy_tol);
    return eq;
}

std::string equilibrium_to_json(const Equilibrium& eq) {
    nlohmann::json j;
    j["coefficients"] = eq.u.coeffs();
    j["residual_Vm2"] = eq.residual;
    j["spectrum"] = eq.spectrum;
    j["nondegenerate"] = eq.nondegenerate;
    j["local_minimizer"] = eq.local_minimizer;
    j["newton_iterations"] = eq.newton_iterations;
    j["contraction_ratios"] = eq.contraction_ratios;
    return j.dump(2);
}

std::vector<SpectralField> default_steady_guesses(const ModalBasis& basis) {
    std::vector<SpectralField> guesses;
    for (double a : {0.0, 1.0, -1.0, 2.0, -2.0}) {
        SpectralField g(basis);
        g[0] = a;
        guesses.push_back(std::move(g));
    }
    return guesses;
}

std::vector<Equilibrium> steady_sweep(const ModalBasis& basis, const Nonlinearity& f,
                                      const std::vector<SpectralField>& guesses,
                                      const NewtonOptions& opts) {
    std::vector<Equilibrium> found;
    std::string last_error = "no guesses";
    for (const auto& g : guesses) {
        Equilibrium eq;
        try {
            eq = solve_steady(basis, f, g, opts);
        } catch (const std::exception& e) {
            last_error = e.what();
            continue;
        }
        bool duplicate = false;
        for (const auto& o : found)
            if (v_norm(eq.u - o.u, 2.0) <= 1e-6) {
                duplicate = true;
                break;
            }
        if (!duplicate) found.push_back(std::move(eq));
    }
    if (found.empty()) throw NewtonFailure("steady_sweep: every Newton attempt failed: " + last_error);
    return found;
}

} // namespace platemem
