#pragma once

// Minimal RAII wrapper over double-precision FFTW plans for square 2D grids.
// Transforms run on an internal buffer; callers pass Eigen arrays by value
// semantics. Unnormalized forward, 1/P^2 inverse.

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <fftw3.h>

namespace meanfield {

class fft2d {
public:
    explicit fft2d(int points_per_axis) : P_(points_per_axis) {
        if (P_ < 2) throw std::invalid_argument("fft2d: grid too small");
        buf_ = fftw_alloc_complex(static_cast<std::size_t>(P_) * P_);
        if (!buf_) throw std::bad_alloc();
        fwd_ = fftw_plan_dft_2d(P_, P_, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(P_, P_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fft2d(const fft2d&) = delete;
    fft2d& operator=(const fft2d&) = delete;
    ~fft2d() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    int size() const { return P_; }

    void forward(Eigen::ArrayXXcd& f) const { run(f, fwd_, 1.0); }
    void inverse(Eigen::ArrayXXcd& f) const { run(f, bwd_, 1.0 / (double(P_) * P_)); }

    /// Wave numbers matching the array layout: k2(i,j) = kx(i)^2 + ky(j)^2 for a
    /// periodic box of side 2L (spacing 2L/P).
    static Eigen::ArrayXXd k_squared(int P, double half_width) {
        Eigen::VectorXd k(P);
        const double dk = M_PI / half_width;  // 2*pi / (2L)
        for (int i = 0; i < P; ++i) k[i] = dk * (i < P / 2 ? i : i - P);
        Eigen::ArrayXXd k2(P, P);
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j) k2(i, j) = k[i] * k[i] + k[j] * k[j];
        return k2;
    }

private:
    void run(Eigen::ArrayXXcd& f, fftw_plan plan, double scale) const {
        if (f.rows() != P_ || f.cols() != P_) throw std::invalid_argument("fft2d: shape mismatch");
        auto* src = reinterpret_cast<const double*>(f.data());
        auto* dst = reinterpret_cast<double*>(buf_);
        std::copy(src, src + 2 * std::size_t(P_) * P_, dst);
        fftw_execute(plan);
        auto* out = reinterpret_cast<double*>(f.data());
        std::copy(dst, dst + 2 * std::size_t(P_) * P_, out);
        if (scale != 1.0) f *= scale;
    }

    int P_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace meanfield
