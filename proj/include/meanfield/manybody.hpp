#pragma once

// Exact N-boson machinery in the truncated Hermite basis: pair-interaction
// matrix elements by exact rotated Gauss-Hermite quadrature, second-quantized
// Hamiltonian assembly with the 1/N Gross-Pitaevskii prefactor, Krylov
// (Lanczos) time evolution, energy moments, spectral smoothing of initial
// data, and minimum-eigenvalue solvers.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <meanfield/hermite.hpp>
#include <meanfield/interaction.hpp>
#include <meanfield/occupation.hpp>
#include <meanfield/util.hpp>

namespace meanfield {

/// Axis-factorized integrals
///   I(a,b,c,d) = int h_a(x1) h_c(x1) h_b(x2) h_d(x2) e^{-rate (x1-x2)^2} dx1 dx2
/// by Gauss-Hermite in rotated coordinates u=(x1-x2)/sqrt2, v=(x1+x2)/sqrt2.
/// The u-rule runs at rate omega+2*rate, so gaussian kernels are integrated
/// exactly; `order_scale` widens the rule for future non-gaussian profiles.
class pair_kernel_table {
public:
    pair_kernel_table(const hermite_basis& basis, double kernel_rate, double order_scale = 1.0,
                      bool self_check = true) {
        dmax_ = basis.max_degree();
        table_ = build(basis, kernel_rate, order_scale, 0);
        if (self_check) {
            auto finer = build(basis, kernel_rate, order_scale, 16);
            double scale = 0.0, worst = 0.0;
            for (double x : finer) scale = std::max(scale, std::abs(x));
            for (std::size_t i = 0; i < table_.size(); ++i)
                worst = std::max(worst, std::abs(table_[i] - finer[i]));
            if (worst > 1e-6 * std::max(scale, 1e-30))
                throw std::runtime_error("pair_kernel_table: quadrature not converged (rel change " +
                                         std::to_string(worst / scale) + ")");
        }
    }

    double operator()(int a, int b, int c, int d) const {
        return table_[((std::size_t(a) * (dmax_ + 1) + b) * (dmax_ + 1) + c) * (dmax_ + 1) + d];
    }
    int max_degree() const { return dmax_; }

private:
    std::vector<double> build(const hermite_basis& basis, double rate, double order_scale,
                              int extra) const {
        const int n1 = dmax_ + 1;
        const double omega = basis.omega();
        const int order = int(std::ceil((2 * dmax_ + 8) * std::max(1.0, order_scale))) + extra;
        auto ru = gauss_hermite_rule(order, omega + 2.0 * rate);
        auto rv = gauss_hermite_rule(order, omega);
        const int Q = order;
        // x1, x2 at all (u,v) node pairs
        Eigen::VectorXd x1(Q * Q), x2(Q * Q), w(Q * Q);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < Q; ++i)
            for (int j = 0; j < Q; ++j) {
                const double u = ru.nodes[i], v = rv.nodes[j];
                x1[i * Q + j] = (v + u) * inv_sqrt2;
                x2[i * Q + j] = (v - u) * inv_sqrt2;
                w[i * Q + j] = ru.weights[i] * rv.weights[j] * std::exp(-2.0 * rate * u * u);
            }
        Eigen::MatrixXd H1 = herm1d_values(dmax_, omega, x1);
        Eigen::MatrixXd H2 = herm1d_values(dmax_, omega, x2);
        // G1[(a,c), pt] = h_a(x1) h_c(x1) * w;  G2[(b,d), pt] = h_b(x2) h_d(x2)
        Eigen::MatrixXd G1(n1 * n1, Q * Q), G2(n1 * n1, Q * Q);
        for (int a = 0; a < n1; ++a)
            for (int c = 0; c < n1; ++c) {
                G1.row(a * n1 + c) = (H1.row(a).array() * H1.row(c).array() * w.transpose().array());
                G2.row(a * n1 + c) = (H2.row(a).array() * H2.row(c).array());
            }
        Eigen::MatrixXd M = G1 * G2.transpose();  // [(a,c),(b,d)]
        std::vector<double> out(std::size_t(n1) * n1 * n1 * n1);
        for (int a = 0; a < n1; ++a)
            for (int b = 0; b < n1; ++b)
                for (int c = 0; c < n1; ++c)
                    for (int d = 0; d < n1; ++d)
                        out[((std::size_t(a) * n1 + b) * n1 + c) * n1 + d] =
                            M(a * n1 + c, b * n1 + d);
        return out;
    }

    int dmax_;
    std::vector<double> table_;
};

/// Dense D^4 tensor of two-body matrix elements <pq|W|rs> for the scaled
/// potential V_N (or |V_N|). Real symmetric: W[pq,rs] = W[rs,pq] = W[qp,sr].
class two_body_tensor {
public:
    two_body_tensor() : D_(0) {}
    two_body_tensor(const hermite_basis& basis, const interaction_spec& v,
                    bool absolute_value = false, bool self_check = true)
        : D_(basis.size()) {
        w_.assign(std::size_t(D_) * D_ * D_ * D_, 0.0);
        if (v.is_zero()) return;
        const double nb = std::pow(double(v.n_particles), v.beta);
        pair_kernel_table t(basis, v.scaled_rate(), std::max(1.0, nb), self_check);
        double amp = v.scaled_amplitude();
        if (absolute_value) amp = std::abs(amp);
        const auto& modes = basis.modes();
        for (int p = 0; p < D_; ++p)
            for (int q = 0; q < D_; ++q)
                for (int r = 0; r < D_; ++r)
                    for (int s = 0; s < D_; ++s)
                        at(p, q, r, s) = amp * t(modes[p].n1, modes[q].n1, modes[r].n1, modes[s].n1) *
                                         t(modes[p].n2, modes[q].n2, modes[r].n2, modes[s].n2);
        // enforce the particle-exchange and transpose symmetries exactly
        // (quadrature roundoff would otherwise break them at the 1e-16 level)
        for (int p = 0; p < D_; ++p)
            for (int q = 0; q < D_; ++q)
                for (int r = 0; r < D_; ++r)
                    for (int s = 0; s < D_; ++s) {
                        const double m = 0.25 * (at(p, q, r, s) + at(q, p, s, r) +
                                                 at(r, s, p, q) + at(s, r, q, p));
                        at(p, q, r, s) = at(q, p, s, r) = at(r, s, p, q) = at(s, r, q, p) = m;
                    }
    }

    int modes() const { return D_; }
    double& at(int p, int q, int r, int s) {
        return w_[((std::size_t(p) * D_ + q) * D_ + r) * D_ + s];
    }
    double at(int p, int q, int r, int s) const {
        return w_[((std::size_t(p) * D_ + q) * D_ + r) * D_ + s];
    }
    const std::vector<double>& raw() const { return w_; }
    std::vector<double>& raw() { return w_; }

private:
    int D_;
    std::vector<double> w_;
};

/// <phi_p phi_q | V_N(x1-x2) | phi_r phi_s> for one mode quadruple.
inline double two_body_element(mode2d p, mode2d q, mode2d r, mode2d s, const interaction_spec& v,
                               const hermite_basis& basis) {
    if (v.is_zero()) return 0.0;
    const double nb = std::pow(double(v.n_particles), v.beta);
    pair_kernel_table t(basis, v.scaled_rate(), std::max(1.0, nb));
    return v.scaled_amplitude() * t(p.n1, q.n1, r.n1, s.n1) * t(p.n2, q.n2, r.n2, s.n2);
}

/// Second-quantized many-body operator
///   sum_p eps_p a+_p a_p + (pair_prefactor) sum_{pqrs} W[pq,rs] a+_p a+_q a_s a_r
/// assembled as a real symmetric sparse matrix on the occupation sector.
class manybody_operator {
public:
    manybody_operator(std::shared_ptr<const occupation_basis> occ, Eigen::VectorXd one_body,
                      const two_body_tensor& w, double pair_prefactor)
        : occ_(std::move(occ)), one_body_(std::move(one_body)) {
        const int D = occ_->num_modes();
        if (one_body_.size() != D)
            throw std::invalid_argument("manybody_operator: one-body size mismatch");
        if (w.modes() != 0 && w.modes() != D)
            throw std::invalid_argument("manybody_operator: two-body tensor mode mismatch");
        const std::size_t dim = occ_->size();
        std::vector<Eigen::Triplet<double>> trip;
        std::vector<int> m1, m2;
        for (std::size_t col = 0; col < dim; ++col) {
            const auto& m = occ_->state(col);
            double diag = 0.0;
            for (int p = 0; p < D; ++p) diag += m[p] * one_body_[p];
            trip.emplace_back(int(col), int(col), diag);
            if (w.modes() == 0 || pair_prefactor == 0.0) continue;
            m1 = m;
            for (int r = 0; r < D; ++r) {
                if (m1[r] == 0) continue;
                const double ar = std::sqrt(double(m1[r]));
                m1[r] -= 1;
                for (int s = 0; s < D; ++s) {
                    if (m1[s] == 0) {
                        continue;
                    }
                    const double as = std::sqrt(double(m1[s]));
                    m2 = m1;
                    m2[s] -= 1;
                    for (int q = 0; q < D; ++q) {
                        const double aq = std::sqrt(double(m2[q] + 1));
                        m2[q] += 1;
                        for (int p = 0; p < D; ++p) {
                            const double wval = w.at(p, q, r, s);
                            if (wval != 0.0) {
                                m2[p] += 1;
                                const double ap = std::sqrt(double(m2[p]));
                                const std::size_t row = occ_->index_of(m2);
                                m2[p] -= 1;
                                trip.emplace_back(int(row), int(col),
                                                  pair_prefactor * wval * ar * as * aq * ap);
                            }
                        }
                        m2[q] -= 1;
                    }
                }
                m1[r] += 1;
            }
        }
        h_.resize(dim, dim);
        h_.setFromTriplets(trip.begin(), trip.end());
    }

    const occupation_basis& basis() const { return *occ_; }
    std::shared_ptr<const occupation_basis> basis_ptr() const { return occ_; }
    std::size_t dim() const { return occ_->size(); }
    const Eigen::SparseMatrix<double>& matrix() const { return h_; }
    const Eigen::VectorXd& one_body() const { return one_body_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        Eigen::VectorXd re = h_ * x.real();
        Eigen::VectorXd im = h_ * x.imag();
        Eigen::VectorXcd out(x.size());
        out.real() = re;
        out.imag() = im;
        return out;
    }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return h_ * x; }

    double hermiticity_residual() const {
        Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(h_.transpose()) - h_;
        double worst = 0.0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
                worst = std::max(worst, std::abs(it.value()));
        return worst;
    }

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(h_); }

private:
    std::shared_ptr<const occupation_basis> occ_;
    Eigen::VectorXd one_body_;
    Eigen::SparseMatrix<double> h_;
};

/// H_N = sum_j S_j^2 + (1/N) sum_{i<j} V_N(x_i - x_j) on the occupation sector.
/// `one_body_scale` weights the kinetic part (used for the alpha-damped
/// operators of the stability estimates).
inline manybody_operator assemble_hamiltonian(std::shared_ptr<const occupation_basis> occ,
                                              const hermite_basis& basis,
                                              const interaction_spec& v,
                                              double one_body_scale = 1.0) {
    if (occ->num_modes() != basis.size())
        throw std::invalid_argument("assemble_hamiltonian: occupation modes != basis size");
    interaction_spec vv = v;
    vv.validate();
    two_body_tensor w(basis, vv);
    const double pref = 1.0 / (2.0 * occ->num_particles());
    return manybody_operator(std::move(occ), one_body_scale * basis.eigenvalues(), w, pref);
}

struct lanczos_result {
    Eigen::VectorXcd vector;
    int substeps = 0;
};

/// exp(-i t H) state by adaptive Lanczos with full reorthogonalization.
/// Per-substep residual budget is tol * (dt / t); happy breakdown is exact.
inline bosonic_state evolve_manybody(const bosonic_state& state, const manybody_operator& op,
                                     double t, double tol = 1e-10, int krylov_dim = 30) {
    if (state.coeffs.size() != static_cast<Eigen::Index>(op.dim()))
        throw std::invalid_argument("evolve_manybody: dimension mismatch");
    if (t == 0.0) return state;
    const std::size_t dim = op.dim();
    const int m_max = int(std::min<std::size_t>(krylov_dim, dim));
    Eigen::VectorXcd v = state.coeffs;
    double remaining = t;
    double dt = t;
    int guard = 0;
    while (remaining > 1e-15 * t) {
        if (++guard > 100000) throw std::runtime_error("evolve_manybody: step control stalled");
        dt = std::min(dt, remaining);
        const double vnorm = v.norm();
        Eigen::MatrixXcd V(dim, m_max);
        Eigen::VectorXd alpha(m_max), beta(m_max);
        V.col(0) = v / vnorm;
        int m = m_max;
        bool breakdown = false;
        for (int j = 0; j < m_max; ++j) {
            Eigen::VectorXcd w = op.apply(Eigen::VectorXcd(V.col(j)));
            alpha[j] = std::real(V.col(j).dot(w));
            w -= alpha[j] * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            for (int r = 0; r <= j; ++r) w -= V.col(r).dot(w) * V.col(r);  // full reorth
            beta[j] = w.norm();
            if (beta[j] < 1e-13 * std::abs(alpha[j]) + 1e-300) {
                m = j + 1;
                breakdown = true;
                break;
            }
            if (j + 1 < m_max) V.col(j + 1) = w / beta[j];
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXcd phases(m);
        for (int j = 0; j < m; ++j) phases[j] = std::polar(1.0, -dt * es.eigenvalues()[j]);
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m);
        e1[0] = 1.0;
        Eigen::VectorXcd small = es.eigenvectors().cast<cd>() *
                                 (phases.array() * (es.eigenvectors().transpose().cast<cd>() * e1).array())
                                     .matrix();
        const double err = breakdown ? 0.0 : beta[m - 1] * std::abs(small[m - 1]) * dt;
        if (breakdown || err <= tol * (dt / t) || dt < 1e-12 * t) {
            if (!breakdown && dt < 1e-12 * t && err > tol * (dt / t))
                throw std::runtime_error("evolve_manybody: Krylov step failed to converge");
            v = vnorm * (V.leftCols(m) * small);
            remaining -= dt;
            dt *= 1.5;
        } else {
            dt *= 0.5;
        }
    }
    bosonic_state out{state.basis, std::move(v)};
    return out;
}

/// <psi, H^k psi>, k <= 4, via split application <H^a psi, H^b psi>.
inline double energy_moment(const bosonic_state& state, const manybody_operator& op, int k) {
    if (k < 1 || k > 4) throw std::invalid_argument("energy_moment: k in {1..4}");
    Eigen::VectorXcd left = state.coeffs, right = state.coeffs;
    for (int i = 0; i < k / 2; ++i) left = op.apply(left);
    for (int i = 0; i < k - k / 2; ++i) right = op.apply(right);
    const cd val = left.dot(right);
    if (std::abs(val.imag()) > 1e-9 * std::max(1.0, std::abs(val.real())))
        throw std::runtime_error("energy_moment: non-real expectation (hermiticity violated)");
    return val.real();
}

/// Energy cutoff profile: 1 on (-inf,1], 0 on [2,inf), exp-based smoothstep between.
inline double smooth_chi(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double t = 2.0 - s;  // in (0,1)
    return g(t) / (g(t) + g(1.0 - t));
}

/// chi(kappa H / N) psi, renormalized. Dense spectral application below
/// `dense_cap`; Chebyshev expansion of chi (max error < 1e-8 on the spectral
/// interval) above it.
inline bosonic_state smooth_cutoff(const bosonic_state& state, const manybody_operator& op,
                                   double kappa, std::size_t dense_cap = 4096) {
    if (kappa <= 0.0) throw std::invalid_argument("smooth_cutoff: kappa must be positive");
    const double N = op.basis().num_particles();
    Eigen::VectorXcd filtered;
    if (op.dim() <= dense_cap) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
        Eigen::VectorXd chi(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < chi.size(); ++i)
            chi[i] = smooth_chi(kappa * es.eigenvalues()[i] / N);
        const Eigen::MatrixXd& U = es.eigenvectors();
        filtered = U.cast<cd>() * (chi.array().cast<cd>() *
                                   (U.transpose().cast<cd>() * state.coeffs).array())
                                      .matrix();
    } else {
        // spectral interval from extremal Ritz values with a 10% margin
        const Eigen::Index dim = Eigen::Index(op.dim());
        auto apply = [&op](const Eigen::VectorXd& x) { return op.apply(x); };
        Eigen::VectorXd v(dim);
        rng64 rng(97531);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
        v.normalize();
        const int m = int(std::min<Eigen::Index>(80, dim));
        Eigen::MatrixXd V(dim, m);
        Eigen::VectorXd alpha(m), beta(m);
        V.col(0) = v;
        int k = m;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = apply(V.col(j));
            alpha[j] = V.col(j).dot(w);
            w -= alpha[j] * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            for (int r = 0; r <= j; ++r) w -= V.col(r).dot(w) * V.col(r);
            beta[j] = w.norm();
            if (beta[j] < 1e-14) { k = j + 1; break; }
            if (j + 1 < m) V.col(j + 1) = w / beta[j];
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (int j = 0; j < k; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < k) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T, Eigen::EigenvaluesOnly);
        double a = tes.eigenvalues().minCoeff(), b = tes.eigenvalues().maxCoeff();
        const double margin = 0.1 * (b - a) + 1e-8;
        a -= margin;
        b += margin;

        // Chebyshev coefficients of chi(kappa x / N) on [a,b] by cosine sums,
        // truncated so the tail bound is below 1e-8
        const int M = 4096;
        std::vector<double> fv(M);
        for (int j = 0; j < M; ++j) {
            const double th = M_PI * (j + 0.5) / M;
            const double x = 0.5 * (b + a) + 0.5 * (b - a) * std::cos(th);
            fv[j] = smooth_chi(kappa * x / N);
        }
        std::vector<double> coef(M);
        for (int kk = 0; kk < M; ++kk) {
            double s = 0.0;
            for (int j = 0; j < M; ++j) s += fv[j] * std::cos(kk * M_PI * (j + 0.5) / M);
            coef[kk] = 2.0 * s / M;
        }
        int deg = M - 1;
        double tail = 0.0;
        while (deg > 1 && tail + std::abs(coef[deg]) < 1e-8) tail += std::abs(coef[deg--]);
        // Clenshaw-style three-term recurrence on vectors with the mapped operator
        const double ctr = 0.5 * (b + a), hw = 0.5 * (b - a);
        auto applym = [&](const Eigen::VectorXcd& x) {
            return ((op.apply(x) - ctr * x) / hw).eval();
        };
        Eigen::VectorXcd t0 = state.coeffs;
        Eigen::VectorXcd t1 = applym(t0);
        filtered = 0.5 * coef[0] * t0 + coef[1] * t1;
        for (int kk = 2; kk <= deg; ++kk) {
            Eigen::VectorXcd t2 = 2.0 * applym(t1) - t0;
            filtered += coef[kk] * t2;
            t0.swap(t1);
            t1.swap(t2);
        }
    }
    const double nrm = filtered.norm();
    if (nrm < 1e-12)
        throw std::runtime_error("smooth_cutoff: cutoff annihilated the state");
    filtered /= nrm;
    return {state.basis, std::move(filtered)};
}

struct min_eig_result {
    double value = 0.0;
    double residual = 0.0;  // ||H v - value v|| for the certified eigenpair
    int iterations = 0;
};

/// Smallest eigenvalue of a dense symmetric matrix, with residual certificate.
inline min_eig_result min_eig_dense(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    min_eig_result r;
    r.value = es.eigenvalues()[0];
    Eigen::VectorXd v = es.eigenvectors().col(0);
    r.residual = (H * v - r.value * v).norm();
    return r;
}

/// Smallest eigenvalue of a symmetric operator given by its action, by
/// restarted Lanczos with full reorthogonalization. Throws (with the residual
/// in the message) on non-convergence.
inline min_eig_result min_eig_lanczos(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                      Eigen::Index dim, double tol = 1e-6, int m = 120,
                                      int max_restarts = 60, std::uint64_t seed = 12345) {
    m = int(std::min<Eigen::Index>(m, dim));
    rng64 rng(seed);
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    v.normalize();
    min_eig_result best;
    for (int restart = 0; restart < max_restarts; ++restart) {
        Eigen::MatrixXd V(dim, m);
        Eigen::VectorXd alpha(m), beta(m);
        V.col(0) = v;
        int k = m;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = apply(V.col(j));
            alpha[j] = V.col(j).dot(w);
            w -= alpha[j] * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            for (int r = 0; r <= j; ++r) w -= V.col(r).dot(w) * V.col(r);
            beta[j] = w.norm();
            if (beta[j] < 1e-14 * (std::abs(alpha[j]) + 1.0)) {
                k = j + 1;
                break;
            }
            if (j + 1 < m) V.col(j + 1) = w / beta[j];
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (int j = 0; j < k; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < k) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXd ritz = V.leftCols(k) * es.eigenvectors().col(0);
        ritz.normalize();
        best.value = es.eigenvalues()[0];
        best.residual = (apply(ritz) - best.value * ritz).norm();
        best.iterations = (restart + 1) * k;
        if (best.residual < tol) return best;
        v = ritz;
    }
    throw std::runtime_error("min_eig_lanczos: no convergence (residual " +
                             std::to_string(best.residual) + ")");
}

/// Minimum eigenvalue of an assembled operator on the symmetric sector;
/// dense below the cap, Lanczos above.
inline min_eig_result min_eig_symmetric(const manybody_operator& op, double tol = 1e-8,
                                        std::size_t dense_cap = 3000) {
    if (op.dim() <= dense_cap) return min_eig_dense(op.dense());
    return min_eig_lanczos([&op](const Eigen::VectorXd& x) { return op.apply(x); },
                           Eigen::Index(op.dim()), std::max(tol, 1e-8));
}

}  // namespace meanfield
