#pragma once

// The optimality counterexample for the projection estimate: the symmetric
// field psi_eps(x1,x2) = chi(x1-x2) chi(x1) chi(x2) ln(-ln(|x1-x2|+eps)) has
// a diagonal trace that diverges as eps -> 0 while ||grad_1 psi_eps|| stays
// bounded, and the Fourier-support identity J_V = J_delta that pins why the
// projection hypothesis cannot be weakened.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <meanfield/fft.hpp>
#include <meanfield/hermite.hpp>
#include <meanfield/util.hpp>

namespace meanfield {

/// Standard exp-based partition: 0 for t <= 0, 1 for t >= 1, C-infinity.
inline double smoothstep_exp(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double g1 = std::exp(-1.0 / t);
    const double g0 = std::exp(-1.0 / (1.0 - t));
    return g1 / (g1 + g0);
}

/// Radial bump: 1 on |x| <= 1/4, 0 on |x| >= 1/2.
inline double bump_chi(double r) { return smoothstep_exp((0.5 - std::abs(r)) / 0.25); }

inline double bump_chi_prime(double r) {
    const double h = 1e-6;
    return (bump_chi(r + h) - bump_chi(r - h)) / (2 * h);
}

struct counterexample_row {
    double epsilon = 0.0;
    double j_diagonal = 0.0;   // int |psi_eps(x,x)|^2 dx
    double grad_norm2 = 0.0;   // ||grad_1 psi_eps||_2^2
};

struct counterexample_result {
    std::vector<counterexample_row> rows;
    double fitted_exponent = 0.0;      // J ~ (ln ln 1/eps)^p
    double grad_variation = 0.0;       // (max-min)/min over the eps list
    bool j_strictly_increasing = true;
};

namespace detail {

inline double counterexample_j(double eps, int n = 400) {
    // psi(x,x) = chi(x)^2 ln(-ln eps); 2D midpoint quadrature of chi^4
    const double L = 0.6, h = 2 * L / n;
    double chi4 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -L + (i + 0.5) * h, y = -L + (j + 0.5) * h;
            const double c = bump_chi(std::hypot(x, y));
            chi4 += c * c * c * c;
        }
    chi4 *= h * h;
    const double l = std::log(-std::log(eps));
    return l * l * chi4;
}

inline double counterexample_grad2(double eps, int nr = 240, int na = 24, int nc = 40) {
    // relative/center coordinates x1 = c + h/2, x2 = c - h/2, dx1 dx2 = dh dc;
    // radial log grading in |h| (the integrand carries ~ 1/(r^2 ln^2 r))
    const double rmin = eps * 1e-3 + 1e-14, rmax = 0.75;
    std::vector<double> rs(nr), wr(nr);
    for (int i = 0; i < nr; ++i)
        rs[i] = std::exp(std::log(rmin) + (std::log(rmax) - std::log(rmin)) * i / (nr - 1.0));
    for (int i = 0; i < nr; ++i) {
        const double lo = i == 0 ? rs[0] : 0.5 * (rs[i - 1] + rs[i]);
        const double hi = i + 1 == nr ? rs[nr - 1] : 0.5 * (rs[i] + rs[i + 1]);
        wr[i] = hi - lo;
    }
    const double wth = 2 * M_PI / na;
    const double clo = -0.55, chi_ = 0.55;
    const double wc = (chi_ - clo) / nc;
    double total = 0.0;
    for (int ir = 0; ir < nr; ++ir) {
        const double r = rs[ir];
        const double ch = bump_chi(r);
        const double dch = bump_chi_prime(r);
        if (ch == 0.0 && dch == 0.0) continue;
        const double lg = std::log(-std::log(r + eps));
        const double lp = -1.0 / ((r + eps) * std::log(r + eps));
        for (int ia = 0; ia < na; ++ia) {
            const double th = (ia + 0.5) * wth;
            const double ex = std::cos(th), ey = std::sin(th);
            const double hx = r * ex, hy = r * ey;
            double cell = 0.0;
            for (int i = 0; i < nc; ++i)
                for (int j = 0; j < nc; ++j) {
                    const double cx = clo + (i + 0.5) * wc, cy = clo + (j + 0.5) * wc;
                    const double x1x = cx + hx / 2, x1y = cy + hy / 2;
                    const double x2x = cx - hx / 2, x2y = cy - hy / 2;
                    const double r1 = std::hypot(x1x, x1y), r2 = std::hypot(x2x, x2y);
                    const double c1 = bump_chi(r1), c2 = bump_chi(r2);
                    if (c1 == 0.0 || c2 == 0.0) continue;
                    const double d1 = bump_chi_prime(r1);
                    const double u1x = r1 > 0 ? x1x / r1 : 0.0;
                    const double u1y = r1 > 0 ? x1y / r1 : 0.0;
                    const double gx = dch * ex * c1 * c2 * lg + ch * d1 * u1x * c2 * lg +
                                      ch * c1 * c2 * lp * ex;
                    const double gy = dch * ey * c1 * c2 * lg + ch * d1 * u1y * c2 * lg +
                                      ch * c1 * c2 * lp * ey;
                    cell += gx * gx + gy * gy;
                }
            total += cell * wc * wc * wth * wr[ir] * r;
        }
    }
    return total;
}

}  // namespace detail

/// Table of (eps, J(eps), ||grad_1 psi_eps||^2) over a decreasing eps list,
/// the fitted growth exponent of J against ln ln eps^-1, and the spread of
/// the gradient norms.
inline counterexample_result counterexample_trace(const std::vector<double>& epsilons) {
    for (double e : epsilons)
        if (!(e > 1e-12 && e < std::exp(-1.0)))
            throw std::invalid_argument("counterexample_trace: eps must lie in (1e-12, 1/e)");
    counterexample_result out;
    for (double e : epsilons)
        out.rows.push_back({e, detail::counterexample_j(e), detail::counterexample_grad2(e)});
    double gmin = out.rows[0].grad_norm2, gmax = gmin;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        gmin = std::min(gmin, out.rows[i].grad_norm2);
        gmax = std::max(gmax, out.rows[i].grad_norm2);
        if (i > 0 && out.rows[i].j_diagonal <= out.rows[i - 1].j_diagonal)
            out.j_strictly_increasing = false;
    }
    out.grad_variation = (gmax - gmin) / gmin;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : out.rows) {
        const double x = std::log(std::log(-std::log(r.epsilon)));
        const double y = std::log(r.j_diagonal);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(out.rows.size());
    out.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

struct trace_identity_result {
    double j_v = 0.0;
    double j_delta = 0.0;
    double difference = 0.0;
    bool hypothesis_satisfied = false;  // M2 <= N^beta
};

/// The Fourier-support identity J_V = J_delta on the periodic grid: V with
/// V_hat = 1 on |xi| <= 4 (smooth bump to zero by |xi| = 8), psi symmetric and
/// band-limited to the annulus [M1, M2] per particle. When M2 <= N^beta both
/// pairings coincide; beyond the hypothesis the difference is genuine.
inline trace_identity_result trace_identity_check(int grid_points, double M1, double M2,
                                                  double N, double beta,
                                                  std::uint64_t seed = 202) {
    const int P = grid_points;
    if (P < 16 || P % 2 != 0) throw std::invalid_argument("trace_identity_check: bad grid");
    if (!(M1 >= 0.0 && M2 > M1)) throw std::invalid_argument("trace_identity_check: bad band");
    // the relative-frequency content of |psi|^2 reaches 2 M2 and must not wrap
    if (2.0 * M2 >= P / 2 - 1) throw std::runtime_error("trace_identity_check: band not resolvable");
    const double nb = std::pow(N, beta);

    auto freq = [P](int i) { return i < P / 2 ? i : i - P; };

    // symmetric band-limited spectrum on the annulus [M1, M2] per particle
    rng64 rng(seed);
    std::vector<std::pair<int, int>> band;
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const double k = std::hypot(double(freq(i)), double(freq(j)));
            if (k >= M1 && k <= M2) band.emplace_back(i, j);
        }
    if (band.empty()) throw std::runtime_error("trace_identity_check: empty band");
    const std::size_t m = band.size();
    Eigen::MatrixXcd amp(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) amp(a, b) = rng.cnormal();
    amp = (amp + amp.transpose()).eval();  // bosonic symmetry psi(x1,x2) = psi(x2,x1)

    const double dx = 2 * M_PI / P;
    fft2d fft(P);
    // wave_a(x) = e^{i xi_a x}
    std::vector<Eigen::ArrayXXcd> waves(m);
    for (std::size_t a = 0; a < m; ++a) {
        Eigen::ArrayXXcd spec = Eigen::ArrayXXcd::Zero(P, P);
        spec(band[a].first, band[a].second) = 1.0;
        fft.inverse(spec);
        waves[a] = spec * double(P) * double(P);
    }

    // V_N from its Fourier bump on the grid frequencies:
    // V_hat(zeta) = 1 for |zeta| <= 4, smooth decay to 0 by |zeta| = 8
    Eigen::ArrayXXcd vreal(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const double k = std::hypot(double(freq(i)), double(freq(j))) / nb;
            vreal(i, j) = k <= 4.0 ? 1.0 : smoothstep_exp((8.0 - k) / 4.0);
        }
    fft.inverse(vreal);
    // V(x) = (2pi)^-2 sum_xi V_hat(xi) e^{i xi x}
    vreal *= double(P) * double(P) / (4.0 * M_PI * M_PI);

    // row-wise sweep over x1: psi(x1, .) is one small inverse transform, so the
    // full two-particle function never needs to be materialized
    trace_identity_result out;
    out.hypothesis_satisfied = M2 <= nb;
    double norm2 = 0.0;
    Eigen::ArrayXXd corr = Eigen::ArrayXXd::Zero(P, P);  // A(d) = sum_c |psi(c, c-d)|^2
    Eigen::ArrayXXcd row(P, P);
    for (int i1 = 0; i1 < P; ++i1)
        for (int j1 = 0; j1 < P; ++j1) {
            row.setZero();
            for (std::size_t b = 0; b < m; ++b) {
                cd s(0, 0);
                for (std::size_t a = 0; a < m; ++a) s += amp(a, b) * waves[a](i1, j1);
                row(band[b].first, band[b].second) = s;
            }
            fft.inverse(row);
            row *= double(P) * double(P);
            norm2 += row.abs2().sum();
            out.j_delta += std::norm(row(i1, j1));
            for (int i2 = 0; i2 < P; ++i2)
                for (int j2 = 0; j2 < P; ++j2)
                    corr(((i1 - i2) % P + P) % P, ((j1 - j2) % P + P) % P) +=
                        std::norm(row(i2, j2));
        }
    norm2 *= dx * dx * dx * dx;
    out.j_delta *= dx * dx / norm2;
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) out.j_v += vreal(i, j).real() * corr(i, j);
    out.j_v *= dx * dx * dx * dx / norm2;
    out.difference = std::abs(out.j_v - out.j_delta);
    return out;
}

}  // namespace meanfield
