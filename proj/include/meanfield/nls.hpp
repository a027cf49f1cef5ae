#pragma once

// Split-step solver for the 2D focusing cubic NLS with harmonic trap,
//   i phi_t = (-Lap + omega^2 |x|^2) phi - b0 |phi|^2 phi,
// plus the conserved quantities and the pair-energy functionals built on the
// same grid machinery. The trap and nonlinearity go into the real-space phase
// half-steps; the kinetic step is exact in Fourier space. The trap keeps every
// state compactly supported well inside the box, so periodic kinetic steps are
// valid; resolution failures show up as mass drift and abort the run.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <meanfield/fft.hpp>
#include <meanfield/hermite.hpp>
#include <meanfield/interaction.hpp>
#include <meanfield/util.hpp>

namespace meanfield {

struct field2d {
    grid_spec grid;
    Eigen::ArrayXXcd values;  // values(i,j) = phi(x_i, y_j)
};

inline double mass(const field2d& f) {
    return f.values.abs2().sum() * f.grid.cell_area();
}

struct nls_params {
    double omega = 1.0;
    double b0 = 0.0;  // coupling |int V|; nonlinearity enters as -b0 |phi|^2 phi
    double dt = 1e-3;
    double t_final = 1.0;

    void validate() const {
        if (omega <= 0.0) throw std::invalid_argument("nls_params: omega must be positive");
        if (b0 < 0.0) throw std::invalid_argument("nls_params: b0 must be nonnegative");
        if (dt <= 0.0) throw std::invalid_argument("nls_params: dt must be positive");
        if (t_final > 0.0 && dt > t_final + 1e-15)
            throw std::invalid_argument("nls_params: dt must not exceed t_final");
    }
};

inline double energy_nls(const field2d& f, const nls_params& p) {
    const int P = f.grid.points_per_axis;
    const double dA = f.grid.cell_area();
    fft2d fft(P);
    Eigen::ArrayXXcd fk = f.values;
    fft.forward(fk);
    const Eigen::ArrayXXd k2 = fft2d::k_squared(P, f.grid.half_width);
    const double kinetic = (k2 * fk.abs2()).sum() * dA / (double(P) * P);
    auto x = f.grid.axis();
    double trap = 0.0, quartic = 0.0;
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const double a2 = std::norm(f.values(i, j));
            trap += (x[i] * x[i] + x[j] * x[j]) * a2;
            quartic += a2 * a2;
        }
    trap *= p.omega * p.omega * dA;
    quartic *= dA;
    return kinetic + trap - 0.5 * p.b0 * quartic;
}

struct nls_observation {
    double t, mass, energy, max_amplitude;
};

struct nls_trajectory {
    std::vector<std::pair<double, field2d>> snapshots;
    std::vector<nls_observation> observations;
    double mass_drift = 0.0;     // max |mass(t) - mass(0)| over the run
    double spectral_tail = 0.0;  // max fraction of |phi_hat|^2 beyond (2/3) k_max
};

/// Strang splitting; local error O(dt^3), global O(dt^2). Snapshots are stored
/// at t=0, every `snapshot_stride` steps if nonzero, and at t_final.
inline nls_trajectory evolve_nls(const field2d& initial, const nls_params& p,
                                 int snapshot_stride = 0, int observe_stride = 1) {
    p.validate();
    const double m0 = mass(initial);
    if (std::abs(m0 - 1.0) > 1e-8)
        throw std::invalid_argument("evolve_nls: initial field must be normalized");
    const int P = initial.grid.points_per_axis;
    fft2d fft(P);
    const Eigen::ArrayXXd k2 = fft2d::k_squared(P, initial.grid.half_width);
    Eigen::ArrayXXcd kin_phase(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) kin_phase(i, j) = std::polar(1.0, -p.dt * k2(i, j));
    auto x = initial.grid.axis();
    Eigen::ArrayXXd trap(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) trap(i, j) = p.omega * p.omega * (x[i] * x[i] + x[j] * x[j]);

    const long steps = std::lround(p.t_final / p.dt);
    nls_trajectory out;
    field2d f = initial;
    out.snapshots.push_back({0.0, f});
    out.observations.push_back({0.0, m0, energy_nls(f, p), std::sqrt(f.values.abs2().maxCoeff())});

    auto half_phase = [&](field2d& g) {
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j) {
                const double veff = trap(i, j) - p.b0 * std::norm(g.values(i, j));
                g.values(i, j) *= std::polar(1.0, -0.5 * p.dt * veff);
            }
    };

    // the splitting is exactly norm preserving, so mass drift alone cannot see
    // resolution loss; track the high-k spectral mass as well and abort when a
    // collapsing or aliased state reaches the outer third of the k grid
    const double k_tail2 = std::pow((2.0 / 3.0) * M_PI / initial.grid.dx(), 2);

    for (long s = 1; s <= steps; ++s) {
        half_phase(f);
        fft.forward(f.values);
        double tail = 0.0, tot = 0.0;
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j) {
                const double a2 = std::norm(f.values(i, j));
                tot += a2;
                if (k2(i, j) > k_tail2) tail += a2;
            }
        out.spectral_tail = std::max(out.spectral_tail, tail / tot);
        if (out.spectral_tail > 1e-6)
            throw std::runtime_error("evolve_nls: under-resolved evolution (spectral tail)");
        f.values *= kin_phase;
        fft.inverse(f.values);
        half_phase(f);

        const double t = s * p.dt;
        const double m = mass(f);
        if (!std::isfinite(m)) throw std::runtime_error("evolve_nls: non-finite state");
        out.mass_drift = std::max(out.mass_drift, std::abs(m - m0));
        if (out.mass_drift > 1e-6)
            throw std::runtime_error("evolve_nls: under-resolved evolution (mass drift)");
        if (observe_stride > 0 && (s % observe_stride == 0 || s == steps))
            out.observations.push_back({t, m, energy_nls(f, p),
                                        std::sqrt(f.values.abs2().maxCoeff())});
        if ((snapshot_stride > 0 && s % snapshot_stride == 0) || s == steps)
            out.snapshots.push_back({t, f});
    }
    return out;
}

/// Gagliardo-Nirenberg quotient ||phi||_4^4 / (||phi||_2^2 ||grad phi||_2^2).
inline double gn_functional(const field2d& f) {
    const int P = f.grid.points_per_axis;
    const double dA = f.grid.cell_area();
    const double m2 = f.values.abs2().sum() * dA;
    if (m2 <= 0.0) throw std::invalid_argument("gn_functional: zero field");
    const double p4 = f.values.abs2().square().sum() * dA;
    fft2d fft(P);
    Eigen::ArrayXXcd fk = f.values;
    fft.forward(fk);
    const Eigen::ArrayXXd k2 = fft2d::k_squared(P, f.grid.half_width);
    const double kin = (k2 * fk.abs2()).sum() * dA / (double(P) * P);
    if (kin <= 0.0) throw std::invalid_argument("gn_functional: constant field");
    return p4 / (m2 * kin);
}

/// Samples of V_N on the grid (for convolution quadrature).
inline Eigen::ArrayXXd sample_scaled_potential(const interaction_spec& v, const grid_spec& g,
                                               bool absolute_value = false) {
    auto x = g.axis();
    const int P = g.points_per_axis;
    Eigen::ArrayXXd out(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const double val = v.v_scaled(x[i], x[j]);
            out(i, j) = absolute_value ? std::abs(val) : val;
        }
    return out;
}

/// int (W * |phi|^2)(x) |phi(x)|^2 dx with W = V_N (or |V_N|), by Fourier
/// convolution on the periodic grid. W is sampled on [-L,L)^2 and index-shifted
/// so that offset 0 means zero displacement (W even, grid periodic).
inline double pair_energy_centered(const field2d& f, const interaction_spec& v,
                                   bool absolute_value) {
    const int P = f.grid.points_per_axis;
    const double dA = f.grid.cell_area();
    fft2d fft(P);
    Eigen::ArrayXXd wsamp = sample_scaled_potential(v, f.grid, absolute_value);
    // shift so that index 0 corresponds to zero displacement
    Eigen::ArrayXXcd w(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j)
            w((i + P / 2) % P, (j + P / 2) % P) = wsamp(i, j);
    Eigen::ArrayXXcd rho = f.values.abs2().cast<cd>();
    Eigen::ArrayXXd rho_real = rho.real();
    fft.forward(rho);
    fft.forward(w);
    rho *= w;
    fft.inverse(rho);
    return (rho.real() * rho_real).sum() * dA * dA;
}

/// <phi, S^2 phi> = int (|grad phi|^2 + omega^2 |x|^2 |phi|^2).
inline double s_norm_squared(const field2d& f, double omega) {
    nls_params p;
    p.omega = omega;
    p.b0 = 0.0;
    return energy_nls(f, p);
}

/// Pair Hartree energy of the regularized two-body operator,
///   2 alpha <S phi, S phi> + ((N-1)/N) int V_N |phi phi|^2 - 2 eps^2 int |V_N| |phi phi|^2.
inline double hartree_energy(const field2d& phi, const interaction_spec& v, double alpha,
                             double epsilon, double omega) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("hartree_energy: alpha must lie in (0,1)");
    if (epsilon < 0.0) throw std::invalid_argument("hartree_energy: epsilon must be nonnegative");
    if (std::abs(mass(phi) - 1.0) > 1e-8)
        throw std::invalid_argument("hartree_energy: phi must be normalized");
    const double kin = s_norm_squared(phi, omega);
    if (v.is_zero()) return 2.0 * alpha * kin;
    const double npair = double(v.n_particles - 1) / v.n_particles;
    const double direct = pair_energy_centered(phi, v, false);
    const double abs_part = pair_energy_centered(phi, v, true);
    return 2.0 * alpha * kin + npair * direct - 2.0 * epsilon * epsilon * abs_part;
}

/// Random smooth normalized field: seeded Hermite coefficients with spectral decay.
inline field2d random_smooth_field(const hermite_basis& basis, const grid_transform& tr,
                                   std::uint64_t seed, double decay = 0.25) {
    rng64 rng(seed);
    Eigen::VectorXcd c(basis.size());
    for (int i = 0; i < basis.size(); ++i)
        c[i] = rng.cnormal() * std::exp(-decay * basis.eigenvalue(i));
    c.normalize();
    field2d f{tr.grid(), tr.to_grid(c)};
    const double m = mass(f);
    f.values /= std::sqrt(m);
    return f;
}

}  // namespace meanfield
