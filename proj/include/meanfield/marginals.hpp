#pragma once

// Marginal densities gamma^(k) of occupation-sector states via normal-ordered
// ladder correlators, trace norms and metrics, the constructive quantum
// de Finetti measure with its Monte Carlo distance estimate, BBGKY residuals
// at the truncation, and the delta-approximation comparison.
//
// gamma^(k) is stored on the full D^k tensor space (row index p*D+q for k=2)
// so partial traces and commutators stay index-transparent.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include <meanfield/manybody.hpp>
#include <meanfield/occupation.hpp>
#include <meanfield/util.hpp>

namespace meanfield {

struct density_matrix {
    int k = 1;
    int modes = 0;
    Eigen::MatrixXcd mat;  // dimension modes^k
};

inline double trace_norm(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((a + a.adjoint()) / 2.0,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

/// Hermiticity / positivity / unit-trace / permutation-symmetry residuals.
struct density_invariants {
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
    double trace_error = 0.0;
    double permutation_asymmetry = 0.0;  // k = 2 only
};

inline density_invariants check_density(const density_matrix& g) {
    density_invariants out;
    out.hermiticity = (g.mat - g.mat.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((g.mat + g.mat.adjoint()) / 2.0,
                                                       Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    out.trace_error = std::abs(g.mat.trace().real() - 1.0) + std::abs(g.mat.trace().imag());
    if (g.k == 2) {
        const int D = g.modes;
        double worst = 0.0;
        for (int p = 0; p < D; ++p)
            for (int q = 0; q < D; ++q)
                for (int r = 0; r < D; ++r)
                    for (int s = 0; s < D; ++s)
                        worst = std::max(worst, std::abs(g.mat(p * D + q, r * D + s) -
                                                         g.mat(q * D + p, s * D + r)));
        out.permutation_asymmetry = worst;
    }
    return out;
}

/// k-th marginal density of a normalized occupation-sector state.
///   gamma^(1)[p,q]       = <a+_q a_p> / N
///   gamma^(2)[(pq),(rs)] = <a+_r a+_s a_q a_p> / (N(N-1))
/// k = 3 follows the same pattern behind a size guard.
inline density_matrix reduce(const bosonic_state& state, int k) {
    const auto& basis = *state.basis;
    const int D = basis.num_modes();
    const int N = basis.num_particles();
    if (k < 1 || k > 3) throw std::invalid_argument("reduce: k in {1,2,3}");
    if (k > N) throw std::invalid_argument("reduce: k exceeds particle number");
    if (k == 3 && D * D * D > 16000) throw std::runtime_error("reduce: k=3 guard exceeded");
    const auto& c = state.coeffs;

    density_matrix g;
    g.k = k;
    g.modes = D;
    const int dimk = int(std::pow(double(D), k) + 0.5);
    g.mat = Eigen::MatrixXcd::Zero(dimk, dimk);

    std::vector<int> m;
    if (k == 1) {
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (c[i] == cd(0, 0)) continue;
            m = basis.state(i);
            for (int p = 0; p < D; ++p) {
                if (m[p] == 0) continue;
                const double a1 = std::sqrt(double(m[p]));
                m[p] -= 1;
                for (int q = 0; q < D; ++q) {
                    const double a2 = std::sqrt(double(m[q] + 1));
                    m[q] += 1;
                    const std::size_t t = basis.index_of(m);
                    m[q] -= 1;
                    g.mat(p, q) += std::conj(c[t]) * c[i] * (a1 * a2);
                }
                m[p] += 1;
            }
        }
        g.mat /= double(N);
    } else if (k == 2) {
        if (N < 2) throw std::invalid_argument("reduce: k=2 needs N >= 2");
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (c[i] == cd(0, 0)) continue;
            m = basis.state(i);
            for (int p = 0; p < D; ++p) {
                if (m[p] == 0) continue;
                const double a1 = std::sqrt(double(m[p]));
                m[p] -= 1;
                for (int q = 0; q < D; ++q) {
                    if (m[q] == 0) { continue; }
                    const double a2 = a1 * std::sqrt(double(m[q]));
                    m[q] -= 1;
                    for (int s = 0; s < D; ++s) {
                        const double a3 = a2 * std::sqrt(double(m[s] + 1));
                        m[s] += 1;
                        for (int r = 0; r < D; ++r) {
                            const double a4 = a3 * std::sqrt(double(m[r] + 1));
                            m[r] += 1;
                            const std::size_t t = basis.index_of(m);
                            m[r] -= 1;
                            g.mat(p * D + q, r * D + s) += std::conj(c[t]) * c[i] * a4;
                        }
                        m[s] -= 1;
                    }
                    m[q] += 1;
                }
                m[p] += 1;
            }
        }
        g.mat /= double(N) * (N - 1);
    } else {
        if (N < 3) throw std::invalid_argument("reduce: k=3 needs N >= 3");
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (c[i] == cd(0, 0)) continue;
            m = basis.state(i);
            for (int p = 0; p < D; ++p) {
                if (m[p] == 0) continue;
                const double a1 = std::sqrt(double(m[p]));
                m[p] -= 1;
                for (int q = 0; q < D; ++q) {
                    if (m[q] == 0) continue;
                    const double a2 = a1 * std::sqrt(double(m[q]));
                    m[q] -= 1;
                    for (int u = 0; u < D; ++u) {
                        if (m[u] == 0) continue;
                        const double a3 = a2 * std::sqrt(double(m[u]));
                        m[u] -= 1;
                        for (int w = 0; w < D; ++w) {
                            const double a4 = a3 * std::sqrt(double(m[w] + 1));
                            m[w] += 1;
                            for (int s = 0; s < D; ++s) {
                                const double a5 = a4 * std::sqrt(double(m[s] + 1));
                                m[s] += 1;
                                for (int r = 0; r < D; ++r) {
                                    const double a6 = a5 * std::sqrt(double(m[r] + 1));
                                    m[r] += 1;
                                    const std::size_t t = basis.index_of(m);
                                    m[r] -= 1;
                                    g.mat((p * D + q) * D + u, (r * D + s) * D + w) +=
                                        std::conj(c[t]) * c[i] * a6;
                                }
                                m[s] -= 1;
                            }
                            m[w] -= 1;
                        }
                        m[u] += 1;
                    }
                    m[q] += 1;
                }
                m[p] += 1;
            }
        }
        g.mat /= double(N) * (N - 1) * (N - 2);
    }
    return g;
}

/// Partial trace over the last particle: D^k -> D^(k-1).
inline density_matrix partial_trace(const density_matrix& g) {
    if (g.k < 2) throw std::invalid_argument("partial_trace: k >= 2 required");
    const int D = g.modes;
    const int outer = int(std::pow(double(D), g.k - 1) + 0.5);
    density_matrix out;
    out.k = g.k - 1;
    out.modes = D;
    out.mat = Eigen::MatrixXcd::Zero(outer, outer);
    for (int i = 0; i < outer; ++i)
        for (int j = 0; j < outer; ++j)
            for (int a = 0; a < D; ++a) out.mat(i, j) += g.mat(i * D + a, j * D + a);
    return out;
}

/// |phi^{(x)k}> as a vector on D^k.
inline Eigen::VectorXcd pure_power_vector(const Eigen::VectorXcd& phi, int k) {
    Eigen::VectorXcd v = phi;
    for (int j = 1; j < k; ++j) {
        Eigen::VectorXcd w(v.size() * phi.size());
        for (Eigen::Index a = 0; a < v.size(); ++a)
            for (Eigen::Index b = 0; b < phi.size(); ++b) w[a * phi.size() + b] = v[a] * phi[b];
        v.swap(w);
    }
    return v;
}

/// Tr | gamma - |phi^k><phi^k| |, in [0,2].
inline double trace_distance_pure_power(const density_matrix& g, const Eigen::VectorXcd& phi,
                                        int k) {
    if (std::abs(phi.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("trace_distance_pure_power: phi must be normalized");
    Eigen::VectorXcd v = pure_power_vector(phi, k);
    if (v.size() != g.mat.rows()) throw std::invalid_argument("trace_distance_pure_power: size");
    return trace_norm(g.mat - v * v.adjoint());
}

/// Finite surrogate of the weak* metric: d = sum_{i<=family_size} 2^-i |Tr J_i (a-b)|
/// with J_i a fixed seeded family of Hermitian operators of norm <= 1. The
/// family is deterministic in (dimension, seed, i) and cached per process.
inline double metric_dk(const density_matrix& a, const density_matrix& b, int family_size,
                        std::uint64_t seed = 0x5eeded) {
    if (a.mat.rows() != b.mat.rows()) throw std::invalid_argument("metric_dk: size mismatch");
    const Eigen::Index n = a.mat.rows();
    static std::map<std::pair<Eigen::Index, std::uint64_t>, std::vector<Eigen::MatrixXcd>> cache;
    auto& family = cache[{n, seed}];
    while (int(family.size()) < family_size) {
        const int i = int(family.size()) + 1;
        rng64 rng = rng64::stream(seed, i);
        Eigen::MatrixXcd j(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c2 = 0; c2 < n; ++c2) j(r, c2) = rng.cnormal();
        j = (j + j.adjoint()).eval() / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(j, Eigen::EigenvaluesOnly);
        j /= std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
        family.push_back(std::move(j));
    }
    double d = 0.0;
    for (int i = 1; i <= family_size; ++i)
        d += std::ldexp(1.0, -i) * std::abs((family[i - 1] * (a.mat - b.mat)).trace());
    return d;
}

struct definetti_result {
    double estimate = 0.0;  // MC estimate of Tr|gamma^(2) - int |phi2><phi2| dmu|
    double mc_error = 0.0;  // delete-one-block jackknife standard error
    double bound = 0.0;     // 8 D / N
    double weight_mean = 0.0;
    bool insufficient_samples = false;
};

/// Monte Carlo distance between gamma^(2) and the second moment of the
/// constructive measure dmu(phi) = dim_sym |<phi^N, psi>|^2 dphi over the unit
/// sphere (uniform sampling, dim_sym = binomial(N+D-1, N)).
inline definetti_result definetti_distance(const bosonic_state& state, std::size_t samples,
                                           std::uint64_t seed) {
    const auto& basis = *state.basis;
    const int D = basis.num_modes();
    const int N = basis.num_particles();
    if (N < 2) throw std::invalid_argument("definetti_distance: N >= 2 required");
    const double dim_sym = binomial(N + D - 1, N);
    density_matrix g2 = reduce(state, 2);

    // sqrt multinomials per occupation state
    std::vector<double> mult(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double f = 1.0;
        int placed = 0;
        for (int m : basis.state(i))
            for (int j = 1; j <= m; ++j) f *= double(++placed) / j;
        mult[i] = std::sqrt(f);
    }

    const int B = 50;
    const std::size_t per_block = samples / B;
    if (per_block == 0) throw std::invalid_argument("definetti_distance: too few samples");
    std::vector<Eigen::MatrixXcd> block(B, Eigen::MatrixXcd::Zero(D * D, D * D));
    std::vector<double> wsum(B, 0.0);
    Eigen::VectorXcd phi(D), pair(D * D);
    std::vector<cd> powers(basis.size());
    std::size_t s_index = 0;
    for (int b = 0; b < B; ++b) {
        for (std::size_t s = 0; s < per_block; ++s, ++s_index) {
            rng64 rng = rng64::stream(seed, s_index);
            for (int i = 0; i < D; ++i) phi[i] = rng.cnormal();
            phi.normalize();
            cd overlap(0, 0);
            for (std::size_t i = 0; i < basis.size(); ++i) {
                cd mono(1, 0);
                const auto& occ = basis.state(i);
                for (int mode = 0; mode < D; ++mode)
                    for (int j = 0; j < occ[mode]; ++j) mono *= phi[mode];
                overlap += std::conj(mult[i] * mono) * state.coeffs[i];
            }
            const double w = dim_sym * std::norm(overlap);
            wsum[b] += w;
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q) pair[p * D + q] = phi[p] * phi[q];
            block[b].noalias() += w * (pair * pair.adjoint());
        }
    }
    const std::size_t used = per_block * B;
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(D * D, D * D);
    double wtotal = 0.0;
    for (int b = 0; b < B; ++b) {
        total += block[b];
        wtotal += wsum[b];
    }

    definetti_result out;
    out.bound = 8.0 * D / N;
    out.weight_mean = wtotal / used;
    out.estimate = trace_norm(g2.mat - total / double(used));
    double mean = 0.0;
    std::vector<double> tj(B);
    for (int b = 0; b < B; ++b) {
        Eigen::MatrixXcd rest = (total - block[b]) / double(used - per_block);
        tj[b] = trace_norm(g2.mat - rest);
        mean += tj[b];
    }
    mean /= B;
    double var = 0.0;
    for (int b = 0; b < B; ++b) var += (tj[b] - mean) * (tj[b] - mean);
    out.mc_error = std::sqrt(var * double(B - 1) / B);
    out.insufficient_samples = out.mc_error > out.bound / 2.0;
    return out;
}

/// Tr_{k+1} gamma^(k+1) - gamma^(k) in trace norm; exact identity of the
/// reduction formulas, so this is a consistency check of the machinery.
inline double compatibility_check(const bosonic_state& state, int k) {
    density_matrix upper = reduce(state, k + 1);
    density_matrix lower = reduce(state, k);
    return trace_norm(partial_trace(upper).mat - lower.mat);
}

/// Two-body tensor as a dense matrix on the D^2 tensor space.
inline Eigen::MatrixXcd two_body_matrix(const two_body_tensor& w) {
    const int D = w.modes();
    Eigen::MatrixXcd m(D * D, D * D);
    for (int p = 0; p < D; ++p)
        for (int q = 0; q < D; ++q)
            for (int r = 0; r < D; ++r)
                for (int s = 0; s < D; ++s) m(p * D + q, r * D + s) = w.at(p, q, r, s);
    return m;
}

struct bbgky_point {
    double t = 0.0;
    double residual = 0.0;  // Frobenius norm of i d_t gamma^(k) - RHS
};

/// Central-difference residual of the truncated BBGKY hierarchy along a
/// uniformly spaced trajectory of occupation-sector states.
inline std::vector<bbgky_point> bbgky_residual(
    const std::vector<std::pair<double, bosonic_state>>& trajectory, int k,
    const interaction_spec& v, const hermite_basis& basis) {
    if (trajectory.size() < 3) throw std::invalid_argument("bbgky_residual: >= 3 samples needed");
    const double h = trajectory[1].first - trajectory[0].first;
    for (std::size_t i = 1; i < trajectory.size(); ++i)
        if (std::abs(trajectory[i].first - trajectory[i - 1].first - h) > 1e-10 * std::max(1.0, h))
            throw std::invalid_argument("bbgky_residual: nonuniform time spacing");
    if (k != 1 && k != 2) throw std::invalid_argument("bbgky_residual: k in {1,2}");

    const int D = basis.size();
    const int N = trajectory[0].second.basis->num_particles();
    two_body_tensor w(basis, v);
    const Eigen::VectorXd& lam = basis.eigenvalues();
    Eigen::MatrixXcd vmat = two_body_matrix(w);

    std::vector<bbgky_point> out;
    for (std::size_t i = 1; i + 1 < trajectory.size(); ++i) {
        Eigen::MatrixXcd lhs, rhs;
        if (k == 1) {
            density_matrix gm = reduce(trajectory[i - 1].second, 1);
            density_matrix gp = reduce(trajectory[i + 1].second, 1);
            density_matrix g0 = reduce(trajectory[i].second, 1);
            density_matrix g2 = reduce(trajectory[i].second, 2);
            lhs = cd(0, 1) * (gp.mat - gm.mat) / (2 * h);
            rhs = Eigen::MatrixXcd::Zero(D, D);
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q) rhs(p, q) = (lam[p] - lam[q]) * g0.mat(p, q);
            // ((N-1)/N) Tr_2 [V, gamma^(2)]
            Eigen::MatrixXcd comm = vmat * g2.mat - g2.mat * vmat;
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q) {
                    cd acc(0, 0);
                    for (int a = 0; a < D; ++a) acc += comm(p * D + a, q * D + a);
                    rhs(p, q) += double(N - 1) / N * acc;
                }
        } else {
            density_matrix gm = reduce(trajectory[i - 1].second, 2);
            density_matrix gp = reduce(trajectory[i + 1].second, 2);
            density_matrix g0 = reduce(trajectory[i].second, 2);
            density_matrix g3 = reduce(trajectory[i].second, 3);
            lhs = cd(0, 1) * (gp.mat - gm.mat) / (2 * h);
            rhs = Eigen::MatrixXcd::Zero(D * D, D * D);
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q)
                    for (int r = 0; r < D; ++r)
                        for (int s = 0; s < D; ++s)
                            rhs(p * D + q, r * D + s) =
                                (lam[p] + lam[q] - lam[r] - lam[s]) * g0.mat(p * D + q, r * D + s);
            rhs += (vmat * g0.mat - g0.mat * vmat) / double(N);
            // ((N-2)/N) sum_{j=1,2} Tr_3 [V_{j3}, gamma^(3)]
            const int D3 = D * D * D;
            Eigen::MatrixXcd v13 = Eigen::MatrixXcd::Zero(D3, D3);
            Eigen::MatrixXcd v23 = Eigen::MatrixXcd::Zero(D3, D3);
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q)
                    for (int r = 0; r < D; ++r)
                        for (int s = 0; s < D; ++s) {
                            const double val = w.at(p, q, r, s);
                            if (val == 0.0) continue;
                            for (int a = 0; a < D; ++a) {
                                // particles (1,3): indices (p a q) vs (r a s)
                                v13((p * D + a) * D + q, (r * D + a) * D + s) += val;
                                // particles (2,3): indices (a p q) vs (a r s)
                                v23((a * D + p) * D + q, (a * D + r) * D + s) += val;
                            }
                        }
            Eigen::MatrixXcd c13 = v13 * g3.mat - g3.mat * v13;
            Eigen::MatrixXcd c23 = v23 * g3.mat - g3.mat * v23;
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q)
                    for (int r = 0; r < D; ++r)
                        for (int s = 0; s < D; ++s) {
                            cd acc(0, 0);
                            for (int a = 0; a < D; ++a)
                                acc += c13((p * D + q) * D + a, (r * D + s) * D + a) +
                                       c23((p * D + q) * D + a, (r * D + s) * D + a);
                            rhs(p * D + q, r * D + s) += double(N - 2) / N * acc;
                        }
        }
        out.push_back({trajectory[i].first, (lhs - rhs).norm()});
    }
    return out;
}

struct delta_comparison_row {
    int n = 0;
    double pairing_v = 0.0;      // Tr (J x I)(-V_N) gamma^(2)
    double pairing_delta = 0.0;  // Tr (J x I)(b0 rho_alpha) gamma^(2)
    double difference = 0.0;
};

struct delta_comparison_result {
    std::vector<delta_comparison_row> rows;
    double fitted_exponent = 0.0;  // decay of |difference| ~ N^-exponent
};

/// Pairing of a fixed two-particle density against -V_N and against the
/// mollified delta b0 rho_alpha (gaussian mollifier, unit mass), in the mode
/// representation; fits the decay of the difference in N.
inline delta_comparison_result delta_comparison(const density_matrix& g2,
                                                const Eigen::MatrixXcd& observable,
                                                const hermite_basis& basis,
                                                const interaction_spec& family,
                                                const std::vector<int>& n_values,
                                                double mollifier_alpha = 1e-2) {
    if (g2.k != 2 || g2.modes != basis.size())
        throw std::invalid_argument("delta_comparison: need a k=2 density on the basis modes");
    const int D = basis.size();
    if (observable.rows() != D) throw std::invalid_argument("delta_comparison: observable size");

    // b0 rho_alpha as an unscaled gaussian pair kernel
    interaction_spec moll;
    moll.family = "gaussian";
    moll.amplitude = family.b0() / (M_PI * mollifier_alpha * mollifier_alpha);
    moll.width = mollifier_alpha;
    moll.beta = 0.5;  // unused: N=1 leaves the profile unscaled
    moll.n_particles = 1;
    two_body_tensor rho_t(basis, moll);
    Eigen::MatrixXcd rho = two_body_matrix(rho_t);

    Eigen::MatrixXcd jbig = Eigen::MatrixXcd::Zero(D * D, D * D);
    for (int p = 0; p < D; ++p)
        for (int q = 0; q < D; ++q)
            for (int r = 0; r < D; ++r) jbig(p * D + q, r * D + q) += observable(p, r);

    delta_comparison_result out;
    for (int n : n_values) {
        interaction_spec v = family;
        v.n_particles = n;
        two_body_tensor w(basis, v);
        Eigen::MatrixXcd vm = -two_body_matrix(w);  // -V_N >= 0 for focusing V
        delta_comparison_row row;
        row.n = n;
        row.pairing_v = (jbig * vm * g2.mat).trace().real();
        row.pairing_delta = (jbig * rho * g2.mat).trace().real();
        row.difference = std::abs(row.pairing_v - row.pairing_delta);
        out.rows.push_back(row);
    }
    // least squares log|diff| ~ -exponent * log N
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& r : out.rows) {
        if (r.difference <= 0) continue;
        const double x = std::log(double(r.n)), y = std::log(r.difference);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) out.fitted_exponent = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return out;
}

}  // namespace meanfield
