#pragma once

// 2D harmonic-oscillator (Hermite) single-particle basis: mode enumeration,
// spectrum of S^2 = -Laplacian + omega^2 |x|^2, Gauss-Hermite quadrature,
// spectral projectors and grid <-> coefficient transforms.
//
// All operations here are pure functions on immutable values; concurrent use
// is safe. Results are bit-deterministic (everything runs on one thread).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace meanfield {

using cd = std::complex<double>;

struct mode2d {
    int n1 = 0;  // x quantum number
    int n2 = 0;  // y quantum number
    friend bool operator==(const mode2d& a, const mode2d& b) {
        return a.n1 == b.n1 && a.n2 == b.n2;
    }
};

/// Eigenvalue of S^2 on mode (n1,n2): 2*omega*(n1+n2+1).
inline double mode_eigenvalue(mode2d m, double omega) {
    if (m.n1 < 0 || m.n2 < 0) throw std::invalid_argument("mode2d: negative quantum number");
    return 2.0 * omega * (m.n1 + m.n2 + 1);
}

/// Modes with 2*omega*(n1+n2+1) <= cutoff_energy in graded-lex order
/// (by shell n1+n2, then by n1 ascending).
inline std::vector<mode2d> enumerate_modes(double omega, double cutoff_energy) {
    omega = std::abs(omega);
    if (omega <= 0.0) throw std::invalid_argument("enumerate_modes: omega must be nonzero");
    if (cutoff_energy < 2.0 * omega)
        throw std::invalid_argument("enumerate_modes: cutoff below ground-state energy 2*omega");
    std::vector<mode2d> out;
    for (int shell = 0; 2.0 * omega * (shell + 1) <= cutoff_energy; ++shell)
        for (int n1 = 0; n1 <= shell; ++n1)
            out.push_back({n1, shell - n1});
    return out;
}

/// D_M = #{modes with S^2 eigenvalue <= M^2}. For omega >= 1/2 this satisfies
/// D_M <= M^4; for smaller omega the count can exceed M^4 (callers assert the
/// bound only where omega >= 1/2 holds).
inline std::size_t dim_leq(double omega, double M) {
    omega = std::abs(omega);
    if (M <= 0.0) throw std::invalid_argument("dim_leq: M must be positive");
    std::size_t count = 0;
    for (int shell = 0; 2.0 * omega * (shell + 1) <= M * M; ++shell)
        count += shell + 1;
    return count;
}

/// Values of the L^2-normalized 1D oscillator eigenfunctions h_0..h_nmax at x,
/// by the normalized three-term recurrence (no factorials, stable to n ~ 10^3).
inline Eigen::MatrixXd herm1d_values(int nmax, double omega, const Eigen::VectorXd& x) {
    const double sw = std::sqrt(omega);
    Eigen::MatrixXd H(nmax + 1, x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double y = sw * x[j];
        const double h0 = std::pow(omega / M_PI, 0.25) * std::exp(-0.5 * y * y);
        H(0, j) = h0;
        if (nmax >= 1) H(1, j) = std::sqrt(2.0) * y * h0;
        for (int n = 1; n < nmax; ++n)
            H(n + 1, j) = std::sqrt(2.0 / (n + 1)) * y * H(n, j)
                        - std::sqrt(double(n) / (n + 1)) * H(n - 1, j);
    }
    return H;
}

/// Quadrature rule integrating f(x) dx exactly (degree <= 2*order-1) for
/// f = polynomial * exp(-rate*x^2).
struct quadrature1d {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Gauss-Hermite rule via the Jacobi matrix; weights in the "modified" form
/// 1/sum_k psi_k(y)^2 (Christoffel function of the oscillator eigenfunctions),
/// which stays well-scaled at large order.
inline quadrature1d gauss_hermite_rule(int order, double rate) {
    if (order < 1) throw std::invalid_argument("gauss_hermite_rule: order >= 1 required");
    if (rate <= 0.0) throw std::invalid_argument("gauss_hermite_rule: rate must be positive");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = std::sqrt(0.5 * k);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    Eigen::VectorXd y = es.eigenvalues();
    Eigen::MatrixXd psi = herm1d_values(order - 1, 1.0, y);
    quadrature1d rule;
    const double s = std::sqrt(rate);
    rule.nodes = y / s;
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i)
        rule.weights[i] = 1.0 / (psi.col(i).squaredNorm() * s);
    return rule;
}

class hermite_basis {
public:
    hermite_basis(double omega, double cutoff_energy)
        : omega_(std::abs(omega)), cutoff_(cutoff_energy),
          modes_(enumerate_modes(omega, cutoff_energy)) {
        max_degree_ = 0;
        eigs_.resize(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            eigs_[i] = mode_eigenvalue(modes_[i], omega_);
            max_degree_ = std::max({max_degree_, modes_[i].n1, modes_[i].n2});
        }
        // exact for any product of two admitted modes, with margin for
        // potential-weighted integrals
        rule_ = gauss_hermite_rule(2 * max_degree_ + 8, omega_);
    }

    double omega() const { return omega_; }
    double cutoff_energy() const { return cutoff_; }
    const std::vector<mode2d>& modes() const { return modes_; }
    int size() const { return static_cast<int>(modes_.size()); }
    int max_degree() const { return max_degree_; }
    double eigenvalue(int i) const { return eigs_[i]; }
    const Eigen::VectorXd& eigenvalues() const { return eigs_; }
    const quadrature1d& axis_rule() const { return rule_; }

    int index_of(mode2d m) const {
        for (std::size_t i = 0; i < modes_.size(); ++i)
            if (modes_[i] == m) return static_cast<int>(i);
        throw std::out_of_range("hermite_basis: mode not in basis");
    }

    /// Mode values at arbitrary 2D points, row = mode, col = point.
    Eigen::MatrixXd eval_modes(const std::vector<std::array<double, 2>>& pts) const {
        Eigen::VectorXd xs(pts.size()), ys(pts.size());
        for (std::size_t j = 0; j < pts.size(); ++j) {
            xs[j] = pts[j][0];
            ys[j] = pts[j][1];
        }
        Eigen::MatrixXd Hx = herm1d_values(max_degree_, omega_, xs);
        Eigen::MatrixXd Hy = herm1d_values(max_degree_, omega_, ys);
        Eigen::MatrixXd out(modes_.size(), pts.size());
        for (std::size_t i = 0; i < modes_.size(); ++i)
            out.row(i) = Hx.row(modes_[i].n1).cwiseProduct(Hy.row(modes_[i].n2));
        return out;
    }

    /// 0/1 mask of the spectral projector P_{<=M}: entry i is 1 iff eigenvalue_i <= M^2.
    Eigen::VectorXd projector_leq(double M) const {
        if (M <= 0.0) throw std::invalid_argument("projector_leq: M must be positive");
        Eigen::VectorXd mask(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i)
            mask[i] = (eigs_[i] <= M * M) ? 1.0 : 0.0;
        return mask;
    }

    /// Multiplies coefficient i by eigenvalue_i^(p/2), i.e. applies S^p.
    Eigen::VectorXcd apply_S_power(const Eigen::VectorXcd& c, double p) const {
        if (p < -2.0) throw std::invalid_argument("apply_S_power: p >= -2 required");
        if (c.size() != static_cast<Eigen::Index>(modes_.size()))
            throw std::invalid_argument("apply_S_power: coefficient size mismatch");
        Eigen::VectorXcd out(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i)
            out[i] = c[i] * std::pow(eigs_[i], 0.5 * p);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["omega"] = omega_;
        j["cutoff_energy"] = cutoff_;
        auto& arr = j["modes"] = nlohmann::json::array();
        for (const auto& m : modes_) arr.push_back({m.n1, m.n2});
        return j;
    }

    static hermite_basis from_json(const nlohmann::json& j) {
        hermite_basis b(j.at("omega").get<double>(), j.at("cutoff_energy").get<double>());
        const auto& arr = j.at("modes");
        if (arr.size() != b.modes_.size())
            throw std::runtime_error("hermite_basis: serialized mode list does not match spectrum");
        for (std::size_t i = 0; i < b.modes_.size(); ++i)
            if (b.modes_[i].n1 != arr[i][0].get<int>() || b.modes_[i].n2 != arr[i][1].get<int>())
                throw std::runtime_error("hermite_basis: serialized mode order mismatch");
        return b;
    }

private:
    double omega_;
    double cutoff_;
    std::vector<mode2d> modes_;
    Eigen::VectorXd eigs_;
    int max_degree_;
    quadrature1d rule_;
};

struct grid_spec {
    double half_width = 8.0;   // domain [-L, L]^2
    int points_per_axis = 256; // even, >= 16

    void validate() const {
        if (half_width <= 0.0) throw std::invalid_argument("grid_spec: half_width must be positive");
        if (points_per_axis < 16 || points_per_axis % 2 != 0)
            throw std::invalid_argument("grid_spec: points_per_axis must be even and >= 16");
    }
    double dx() const { return 2.0 * half_width / points_per_axis; }
    double cell_area() const { return dx() * dx(); }
    Eigen::VectorXd axis() const {
        Eigen::VectorXd x(points_per_axis);
        for (int i = 0; i < points_per_axis; ++i) x[i] = -half_width + i * dx();
        return x;
    }
    friend bool operator==(const grid_spec& a, const grid_spec& b) {
        return a.half_width == b.half_width && a.points_per_axis == b.points_per_axis;
    }
};

/// Grid <-> spectral transforms for one basis/grid pairing. Construction
/// fails if the grid does not resolve every admitted mode (per-axis mode mass
/// on the grid must match 1 to 1e-10).
class grid_transform {
public:
    grid_transform(const hermite_basis& basis, const grid_spec& grid)
        : basis_(&basis), grid_(grid) {
        grid_.validate();
        Hx_ = herm1d_values(basis.max_degree(), basis.omega(), grid_.axis());
        const double dx = grid_.dx();
        for (int d = 0; d <= basis.max_degree(); ++d) {
            const double mass = Hx_.row(d).squaredNorm() * dx;
            if (std::abs(mass - 1.0) > 1e-10)
                throw std::runtime_error(
                    "grid_transform: grid does not resolve basis mode of degree " +
                    std::to_string(d) + " (mass error " + std::to_string(mass - 1.0) + ")");
        }
    }

    const grid_spec& grid() const { return grid_; }
    const hermite_basis& basis() const { return *basis_; }

    /// L^2 inner products <h_m, f> by grid quadrature; f is (P x P), f(i,j) = f(x_i, y_j).
    Eigen::VectorXcd to_spectral(const Eigen::ArrayXXcd& f) const {
        const int P = grid_.points_per_axis;
        if (f.rows() != P || f.cols() != P)
            throw std::invalid_argument("to_spectral: field shape mismatch");
        // C(a,b) = sum_{ij} Hx(a,i) f(i,j) Hx(b,j) * dA
        Eigen::MatrixXcd tmp = Hx_.cast<cd>() * f.matrix();          // (deg+1) x P
        Eigen::MatrixXcd C = tmp * Hx_.transpose().cast<cd>();       // (deg+1) x (deg+1)
        C *= grid_.cell_area();
        Eigen::VectorXcd c(basis_->size());
        const auto& modes = basis_->modes();
        for (int i = 0; i < basis_->size(); ++i) c[i] = C(modes[i].n1, modes[i].n2);
        return c;
    }

    Eigen::ArrayXXcd to_grid(const Eigen::VectorXcd& c) const {
        if (c.size() != basis_->size())
            throw std::invalid_argument("to_grid: coefficient size mismatch");
        const int dmax = basis_->max_degree();
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(dmax + 1, dmax + 1);
        const auto& modes = basis_->modes();
        for (int i = 0; i < basis_->size(); ++i) C(modes[i].n1, modes[i].n2) += c[i];
        Eigen::MatrixXcd f = Hx_.transpose().cast<cd>() * C * Hx_.cast<cd>();
        return f.array();
    }

private:
    const hermite_basis* basis_;
    grid_spec grid_;
    Eigen::MatrixXd Hx_;
};

}  // namespace meanfield
