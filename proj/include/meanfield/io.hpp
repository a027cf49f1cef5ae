#pragma once

// Serialization: CSV emission with fixed column order and 17-significant-digit
// floats, complex64 binary snapshots with a one-line JSON header, and the
// on-disk cache for assembled two-body tensors.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <meanfield/manybody.hpp>
#include <meanfield/nls.hpp>
#include <meanfield/occupation.hpp>

namespace meanfield {

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class csv_writer {
public:
    csv_writer(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
        if (!out_) throw std::runtime_error("csv_writer: cannot open " + path);
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
        cols_ = columns.size();
    }
    void row(const std::vector<double>& values) {
        if (values.size() != cols_) throw std::invalid_argument("csv_writer: column mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_g17(values[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t cols_;
};

namespace detail {

inline void write_complex64_blob(std::ofstream& out, const cd* data, std::size_t n) {
    std::vector<float> buf(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[2 * i] = static_cast<float>(data[i].real());
        buf[2 * i + 1] = static_cast<float>(data[i].imag());
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              std::streamsize(buf.size() * sizeof(float)));
}

inline std::vector<cd> read_complex64_blob(std::ifstream& in, std::size_t n) {
    std::vector<float> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("snapshot: truncated complex64 payload");
    std::vector<cd> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = cd(buf[2 * i], buf[2 * i + 1]);
    return out;
}

}  // namespace detail

/// Field snapshot: one JSON header line {grid:{...}, t}, then row-major
/// complex64 values (value(i,j) = f(x_i, y_j), j fastest).
inline void write_field_snapshot(const std::string& path, const field2d& f, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field_snapshot: cannot open " + path);
    nlohmann::json header = {
        {"grid", {{"half_width", f.grid.half_width}, {"points_per_axis", f.grid.points_per_axis}}},
        {"t", t},
        {"dtype", "complex64"},
        {"layout", "row-major"}};
    out << header.dump() << "\n";
    const int P = f.grid.points_per_axis;
    std::vector<cd> row_major(std::size_t(P) * P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) row_major[std::size_t(i) * P + j] = f.values(i, j);
    detail::write_complex64_blob(out, row_major.data(), row_major.size());
}

inline std::pair<field2d, double> read_field_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field_snapshot: cannot open " + path);
    std::string line;
    std::getline(in, line);
    auto header = nlohmann::json::parse(line);
    grid_spec g{header.at("grid").at("half_width").get<double>(),
                header.at("grid").at("points_per_axis").get<int>()};
    const int P = g.points_per_axis;
    auto blob = detail::read_complex64_blob(in, std::size_t(P) * P);
    field2d f{g, Eigen::ArrayXXcd(P, P)};
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) f.values(i, j) = blob[std::size_t(i) * P + j];
    return {std::move(f), header.at("t").get<double>()};
}

/// State snapshot: JSON header {D, N, basis_hash}, then the coefficient vector.
inline void write_state_snapshot(const std::string& path, const bosonic_state& st) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_state_snapshot: cannot open " + path);
    nlohmann::json header = {{"D", st.basis->num_modes()},
                             {"N", st.basis->num_particles()},
                             {"basis_hash", st.basis->hash()},
                             {"dtype", "complex64"}};
    out << header.dump() << "\n";
    detail::write_complex64_blob(out, st.coeffs.data(), std::size_t(st.coeffs.size()));
}

inline bosonic_state read_state_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_state_snapshot: cannot open " + path);
    std::string line;
    std::getline(in, line);
    auto header = nlohmann::json::parse(line);
    auto basis = std::make_shared<occupation_basis>(header.at("D").get<int>(),
                                                    header.at("N").get<int>());
    if (header.at("basis_hash").get<std::uint64_t>() != basis->hash())
        throw std::runtime_error("read_state_snapshot: basis hash mismatch");
    auto blob = detail::read_complex64_blob(in, basis->size());
    bosonic_state st{std::move(basis), Eigen::Map<Eigen::VectorXcd>(blob.data(), blob.size())};
    return st;
}

/// Disk cache of assembled two-body tensors keyed by the physical parameters.
/// Location from MEANFIELD_CACHE_DIR; disabled when the variable is unset.
class hamiltonian_cache {
public:
    hamiltonian_cache() {
        if (const char* dir = std::getenv("MEANFIELD_CACHE_DIR")) {
            dir_ = dir;
            std::filesystem::create_directories(dir_);
        }
    }
    explicit hamiltonian_cache(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    std::string key(const hermite_basis& basis, const interaction_spec& v) const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](double x) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof bits);
            h ^= bits;
            h *= 1099511628211ULL;
        };
        mix(basis.omega());
        mix(basis.cutoff_energy());
        mix(v.amplitude);
        mix(v.width);
        mix(v.beta);
        mix(double(v.n_particles));
        mix(v.is_zero() ? 0.0 : 1.0);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    bool load(const std::string& k, int D, two_body_tensor& w) const {
        if (!enabled()) return false;
        std::ifstream in(dir_ + "/" + k + ".w2b", std::ios::binary);
        if (!in) return false;
        std::int64_t d = 0;
        in.read(reinterpret_cast<char*>(&d), sizeof d);
        if (!in || d != D) return false;
        std::vector<double> raw(std::size_t(D) * D * D * D);
        in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size() * sizeof(double)));
        if (!in) return false;
        w.raw() = std::move(raw);
        return true;
    }

    void store(const std::string& k, int D, const two_body_tensor& w) const {
        if (!enabled()) return;
        std::ofstream out(dir_ + "/" + k + ".w2b", std::ios::binary);
        const std::int64_t d = D;
        out.write(reinterpret_cast<const char*>(&d), sizeof d);
        out.write(reinterpret_cast<const char*>(w.raw().data()),
                  std::streamsize(w.raw().size() * sizeof(double)));
    }

private:
    std::string dir_;
};

/// assemble_hamiltonian with the two-body tensor routed through the cache.
inline manybody_operator assemble_hamiltonian_cached(std::shared_ptr<const occupation_basis> occ,
                                                     const hermite_basis& basis,
                                                     const interaction_spec& v,
                                                     const hamiltonian_cache& cache,
                                                     double one_body_scale = 1.0) {
    if (occ->num_modes() != basis.size())
        throw std::invalid_argument("assemble_hamiltonian_cached: occupation modes != basis size");
    interaction_spec vv = v;
    vv.validate();
    const double pref = 1.0 / (2.0 * occ->num_particles());
    if (cache.enabled()) {
        const std::string k = cache.key(basis, vv);
        two_body_tensor w(basis, interaction_spec{"zero", 0.0, 1.0, vv.beta, vv.n_particles});
        if (cache.load(k, basis.size(), w))
            return manybody_operator(std::move(occ), one_body_scale * basis.eigenvalues(), w, pref);
        two_body_tensor fresh(basis, vv);
        cache.store(k, basis.size(), fresh);
        return manybody_operator(std::move(occ), one_body_scale * basis.eigenvalues(), fresh, pref);
    }
    two_body_tensor w(basis, vv);
    return manybody_operator(std::move(occ), one_body_scale * basis.eigenvalues(), w, pref);
}

}  // namespace meanfield
