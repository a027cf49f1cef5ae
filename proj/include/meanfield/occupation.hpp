#pragma once

// Bosonic occupation-number sector: deterministic enumeration of the
// symmetric N-particle basis over D single-particle modes, and product
// (condensate) states. Dimension is binomial(D+N-1, N); symmetry is exact by
// construction.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include <meanfield/hermite.hpp>

namespace meanfield {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

class occupation_basis {
public:
    occupation_basis(int D, int N, std::size_t cap = 200000) : D_(D), N_(N) {
        if (D < 1 || N < 1) throw std::invalid_argument("occupation_basis: D,N >= 1 required");
        const double dim = binomial(D + N - 1, N);
        if (dim > double(cap))
            throw std::runtime_error("occupation_basis: dimension " + std::to_string(dim) +
                                     " exceeds cap " + std::to_string(cap));
        std::vector<int> occ(D, 0);
        enumerate(occ, 0, N);
        if (states_.size() != std::size_t(dim + 0.5))
            throw std::logic_error("occupation_basis: enumeration does not match the dimension formula");
        index_.reserve(states_.size() * 2);
        for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(key(states_[i]), i);
    }

    int num_modes() const { return D_; }
    int num_particles() const { return N_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<int>& state(std::size_t i) const { return states_[i]; }
    const std::vector<std::vector<int>>& states() const { return states_; }

    std::size_t index_of(const std::vector<int>& occ) const {
        auto it = index_.find(key(occ));
        if (it == index_.end()) throw std::out_of_range("occupation_basis: state not in sector");
        return it->second;
    }

    /// FNV-1a over the occupation list; used to tag snapshots on disk.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ULL;
        };
        mix(D_);
        mix(N_);
        for (const auto& st : states_)
            for (int m : st) mix(std::uint64_t(m));
        return h;
    }

private:
    static std::string key(const std::vector<int>& occ) {
        std::string k(occ.size(), '\0');
        for (std::size_t i = 0; i < occ.size(); ++i) k[i] = static_cast<char>(occ[i]);
        return k;
    }
    // descending lexicographic: all particles in the first mode come first
    void enumerate(std::vector<int>& occ, int slot, int remaining) {
        if (slot == D_ - 1) {
            occ[slot] = remaining;
            states_.push_back(occ);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            occ[slot] = k;
            enumerate(occ, slot + 1, remaining - k);
        }
        occ[slot] = 0;
    }

    int D_, N_;
    std::vector<std::vector<int>> states_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct bosonic_state {
    std::shared_ptr<const occupation_basis> basis;
    Eigen::VectorXcd coeffs;

    double norm() const { return coeffs.norm(); }
    void check_normalized(double tol = 1e-9) const {
        if (std::abs(norm() - 1.0) > tol)
            throw std::runtime_error("bosonic_state: not normalized");
    }
};

/// phi^{(x) N}: coefficient on (m_1..m_D) is sqrt(N!/prod m_i!) prod phi_i^{m_i}.
inline bosonic_state product_state(std::shared_ptr<const occupation_basis> basis,
                                   const Eigen::VectorXcd& phi) {
    if (phi.size() != basis->num_modes())
        throw std::invalid_argument("product_state: phi size must match mode count");
    if (std::abs(phi.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("product_state: phi must be normalized");
    const int N = basis->num_particles();
    Eigen::VectorXcd c(basis->size());
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const auto& occ = basis->state(i);
        double multinom = 1.0;  // N! / prod m_i!
        {
            int placed = 0;
            for (int m : occ) {
                for (int j = 1; j <= m; ++j) {
                    ++placed;
                    multinom *= double(placed) / j;
                }
            }
        }
        cd val = std::sqrt(multinom);
        for (int mode = 0; mode < basis->num_modes(); ++mode)
            for (int j = 0; j < occ[mode]; ++j) val *= phi[mode];
        c[i] = val;
    }
    bosonic_state st{std::move(basis), std::move(c)};
    if (std::abs(st.coeffs.norm() - 1.0) > 1e-12) st.coeffs.normalize();
    return st;
}

}  // namespace meanfield
