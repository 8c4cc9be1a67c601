#include "platemem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace platemem {

double energy_E(const StateVector& z, const Nonlinearity& f) {
    return 0.5 * z.norm_sq(0.0) + quadrature_of(z.u, [&](double s) { return f.F(s); });
}

namespace {

// -sum_k lambda_k^r theta_k m_k with m the mu-weighted history integral;
// linearity of the pairing collapses the age integral onto m
double memory_pairing(const StateVector& z, double r) {
    const std::vector<double>& m = z.eta.memory_integral();
    double acc = 0.0;
    for (int k = 0; k < z.theta.size(); ++k)
        acc += std::pow(z.eta.basis().lambda(k), r) * z.theta[k] * m[k];
    return -acc;
}

// <A^2 u + f(u), v>_{V^{-2}} = sum_k lambda_k^{-2} (lambda_k^2 u_k + f_k) v_k
double gradient_pairing(const StateVector& z, const Nonlinearity& f) {
    const SpectralField fu = project_f(z.u, f);
    double acc = 0.0;
    for (int k = 0; k < z.u.size(); ++k) {
        const double lam = z.u.basis().lambda(k);
        acc += (z.u[k] + fu[k] / (lam * lam)) * z.v[k];
    }
    return acc;
}

double l2_inner(const SpectralField& a, const SpectralField& b) { return v_inner(a, b, 0.0); }

} // namespace

double functional_J(const StateVector& z) { return memory_pairing(z, 0.0); }

double functional_J1(const StateVector& z) { return memory_pairing(z, 1.0); }

double functional_H(const StateVector& z, const Nonlinearity& f, const FunctionalConfig& cfg) {
    return 0.5 * (v_norm_sq(z.v, 0.0) + v_norm_sq(z.theta, 0.0) + z.eta.m_norm_sq(1.0)) +
           energy_of_u(z.u, f) + cfg.alpha * functional_J(z) + cfg.eps * gradient_pairing(z, f);
}

double functional_Psi(const StateVector& z, const Nonlinearity& f, double eps) {
    return 0.5 * z.norm_sq(0.0) + 0.5 * eps * eps * v_norm_sq(z.u, 1.0) +
           quadrature_of(z.u, [&](double s) { return f.F(s); }) + eps * eps * l2_inner(z.u, z.v) +
           2.0 * eps * functional_J(z);
}

double functional_Phi(const StateVector& zc, const SpectralField& u_full, const Nonlinearity& f,
                      double eps, double k) {
    const SpectralField fu = project_f(u_full, f);
    const SpectralField au_c = apply_A_power(zc.u, 1.0);
    return zc.norm_sq(1.0) + 2.0 * l2_inner(fu, au_c) + 2.0 * eps * eps * l2_inner(zc.v, au_c) +
           eps * eps * v_norm_sq(zc.u, 2.0) + 4.0 * eps * functional_J1(zc) + k;
}

double functional_y(const StateVector& z, const SpectralField& u_inf, const Nonlinearity& f, double eps) {
    const SpectralField du = z.u - u_inf;
    const SpectralField f_inf = project_f(u_inf, f);
    const double f_quad = quadrature_of(z.u, [&](double s) { return f.F(s); }) -
                          quadrature_of(u_inf, [&](double s) { return f.F(s); }) -
                          l2_inner(f_inf, du);
    return 0.5 * v_norm_sq(du, 2.0) + 0.5 * v_norm_sq(z.v, 0.0) + 0.5 * v_norm_sq(z.theta, 0.0) +
           0.5 * z.eta.m_norm_sq(1.0) + 0.5 * eps * eps * v_norm_sq(du, 1.0) + f_quad +
           eps * eps * l2_inner(z.v, du) + 2.0 * eps * functional_J(z);
}

double functional_Upsilon(const StateVector& zc, const SpectralField& u_full,
                          const SpectralField& u_inf, const Nonlinearity& f, double eps) {
    const SpectralField du = zc.u - u_inf;
    const SpectralField adu = apply_A_power(du, 1.0);
    const SpectralField df = project_f(u_full, f) - project_f(u_inf, f);
    const double shifted_sq = v_norm_sq(du, 3.0) + v_norm_sq(zc.v, 1.0) + v_norm_sq(zc.theta, 1.0) +
                              zc.eta.m_norm_sq(2.0);
    return shifted_sq + 2.0 * l2_inner(df, adu) + 2.0 * eps * eps * l2_inner(zc.v, adu) +
           eps * eps * v_norm_sq(du, 2.0) + 4.0 * eps * functional_J1(zc);
}

EnergySample make_sample(const StateVector& z, const Nonlinearity& f, const FunctionalConfig& cfg,
                         const SpectralField* u_inf) {
    EnergySample s;
    s.t = z.t;
    s.E = energy_E(z, f);
    s.H = functional_H(z, f, cfg);
    s.J = functional_J(z);
    s.norm_v = v_norm(z.v, 0.0);
    s.norm_theta = v_norm(z.theta, 0.0);
    s.norm_eta_M1 = z.eta.m_norm(1.0);
    s.grad_v_sq = v_norm_sq(z.v, 1.0);
    s.pairing = z.eta.dissipation_pairing(1.0);
    s.stat_residual = stationarity_residual(z.u, f);
    s.energy_u = energy_of_u(z.u, f);
    if (u_inf) {
        const SpectralField du = z.u - *u_inf;
        s.dist_u_V2 = v_norm(du, 2.0);
        s.dist_V0 = std::sqrt(v_norm_sq(du, 2.0) + v_norm_sq(z.v, 0.0) + v_norm_sq(z.theta, 0.0) +
                              z.eta.m_norm_sq(1.0));
    } else {
        s.dist_V0 = std::numeric_limits<double>::quiet_NaN();
        s.dist_u_V2 = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

ResidualReport dissipation_residual(std::vector<EnergySample>& samples, double dt, Scheme scheme) {
    if (samples.size() < 2) throw std::invalid_argument("dissipation_residual: need at least two samples");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (std::abs(samples[i].t - samples[i - 1].t - dt) > 1e-9 * dt)
            throw std::invalid_argument("dissipation_residual: samples must be at every step");

    ResidualReport rep;
    samples[0].dissipation_residual = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double d_new = samples[i].grad_v_sq - samples[i].pairing;
        const double d_old = samples[i - 1].grad_v_sq - samples[i - 1].pairing;
        const double d = (scheme == Scheme::Imex1) ? d_new : 0.5 * (d_old + d_new);
        const double r = samples[i].E - samples[i - 1].E + dt * d;
        samples[i].dissipation_residual = r;
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
        rep.total_abs += std::abs(r);
    }
    return rep;
}

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need matching series with >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LinFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& value, double t_a, double t_b) {
    if (t.size() != value.size()) throw std::invalid_argument("fit_rate: series lengths differ");
    std::vector<double> lt, lv, tt;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_a || t[i] > t_b) continue;
        if (!(value[i] > 0.0)) throw std::invalid_argument("fit_rate: nonpositive value in window");
        lt.push_back(std::log1p(t[i]));
        tt.push_back(t[i]);
        lv.push_back(std::log(value[i]));
    }
    if (lv.size() < 3) throw std::invalid_argument("fit_rate: fewer than three points in window");

    const LinFit poly = linear_fit(lt, lv);
    const LinFit expo = linear_fit(tt, lv);
    RateFit fit;
    fit.p = -poly.slope;
    fit.prefactor = std::exp(poly.intercept);
    fit.r2_poly = poly.r2;
    fit.rate = -expo.slope;
    fit.prefactor_exp = std::exp(expo.intercept);
    fit.r2_exp = expo.r2;
    fit.t_a = t_a;
    fit.t_b = t_b;
    fit.rho_hat = std::isfinite(fit.p) ? fit.p / (1.0 + 2.0 * fit.p) : 0.5;
    fit.exponential_wins = fit.r2_exp > fit.r2_poly;
    return fit;
}

LojasiewiczProbe ls_probe(const std::vector<double>& energy_gap, const std::vector<double>& stat_residual,
                          double tail_fraction) {
    if (energy_gap.size() != stat_residual.size())
        throw std::invalid_argument("ls_probe: series lengths differ");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw std::invalid_argument("ls_probe: tail_fraction must be in (0, 1]");
    const std::size_t start =
        static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(energy_gap.size())));
    std::vector<double> lg, lr;
    for (std::size_t i = start; i < energy_gap.size(); ++i) {
        const double g = std::abs(energy_gap[i]);
        if (!(g > 0.0) || !(stat_residual[i] > 0.0)) continue;
        lg.push_back(std::log(g));
        lr.push_back(std::log(stat_residual[i]));
    }
    if (lg.size() < 3) throw std::invalid_argument("ls_probe: fewer than three usable samples");

    const LinFit fit = linear_fit(lg, lr);
    LojasiewiczProbe probe;
    probe.sigma = fit.slope;
    probe.r2 = fit.r2;
    probe.samples_used = static_cast<int>(lg.size());
    probe.rho_hat = std::clamp(1.0 - fit.slope, 1e-6, 0.5);
    // tightest constant realizing residual >= constant * gap^{1 - rho}
    double beta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lg.size(); ++i)
        beta = std::min(beta, std::exp(lr[i] - (1.0 - probe.rho_hat) * lg[i]));
    probe.constant = beta;
    probe.worst_violation = 0.0; // beta is the sample-wise infimum, so none violate
    return probe;
}

AbsorbingAudit absorbing_audit(const std::vector<std::vector<double>>& norm_series,
                               const std::vector<double>& times) {
    if (norm_series.empty()) throw std::invalid_argument("absorbing_audit: no trajectories");
    const std::size_t n = times.size();
    for (const auto& s : norm_series)
        if (s.size() != n) throw std::invalid_argument("absorbing_audit: series lengths differ");

    // suffix suprema per trajectory
    std::vector<std::vector<double>> suffix(norm_series.size(), std::vector<double>(n));
    std::vector<double> candidates;
    for (std::size_t i = 0; i < norm_series.size(); ++i) {
        double sup = 0.0;
        for (std::size_t j = n; j-- > 0;) {
            sup = std::max(sup, norm_series[i][j]);
            suffix[i][j] = sup;
        }
        candidates.insert(candidates.end(), norm_series[i].begin(), norm_series[i].end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // a radius is admissible for trajectory i when, from the first sample
    // inside the ball, the trajectory never leaves it again
    auto admissible = [&](double r, std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
            if (norm_series[i][j] <= r) return suffix[i][j] <= r;
        return false;
    };
    double radius = candidates.back(); // global sup is always admissible
    for (double r : candidates) {
        bool ok = true;
        for (std::size_t i = 0; ok && i < norm_series.size(); ++i) ok = admissible(r, i);
        if (ok) {
            radius = r;
            break;
        }
    }

    AbsorbingAudit audit;
    audit.radius = radius;
    for (std::size_t i = 0; i < norm_series.size(); ++i) {
        AbsorbingEntry e;
        for (std::size_t j = 0; j < n; ++j)
            if (norm_series[i][j] <= radius) {
                e.entry_time = times[j];
                e.post_entry_sup = suffix[i][j];
                break;
            }
        if (e.post_entry_sup > radius) ++audit.violations;
        audit.entries.push_back(e);
    }
    return audit;
}

HProbeSample h_probe(const StateVector& z, const Nonlinearity& f) {
    HProbeSample s;
    s.t = z.t;
    s.base = 0.5 * (v_norm_sq(z.v, 0.0) + v_norm_sq(z.theta, 0.0) + z.eta.m_norm_sq(1.0)) +
             energy_of_u(z.u, f);
    s.J = functional_J(z);
    s.pairing = gradient_pairing(z, f);
    return s;
}

FunctionalConfig coefficient_audit(const std::vector<HProbeSample>& probe) {
    if (probe.size() < 3) throw std::invalid_argument("coefficient_audit: probe too short");
    const std::size_t transient = probe.size() / 20; // first 5% of samples
    double alpha = 0.25, eps = 0.0625;
    while (alpha >= std::ldexp(1.0, -20) && eps >= std::ldexp(1.0, -20)) {
        bool monotone = true;
        double prev = probe[transient].base + alpha * probe[transient].J + eps * probe[transient].pairing;
        for (std::size_t i = transient + 1; monotone && i < probe.size(); ++i) {
            const double h = probe[i].base + alpha * probe[i].J + eps * probe[i].pairing;
            if (h > prev + 1e-10 * std::abs(prev)) monotone = false;
            prev = h;
        }
        if (monotone) {
            FunctionalConfig cfg;
            cfg.alpha = alpha;
            cfg.eps = eps;
            cfg.transient_samples = static_cast<int>(transient);
            return cfg;
        }
        alpha *= 0.5;
        eps *= 0.5;
    }
    throw std::runtime_error("coefficient_audit: no (alpha, eps) pair down to 2^-20 keeps H monotone");
}

} // namespace platemem
