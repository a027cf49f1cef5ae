#pragma once

// Pair-interaction profile with Gross-Pitaevskii scaling V_N(x) = N^{2 beta} V(N^beta x).
// Default family: gaussian, V(x) = amplitude * exp(-|x|^2 / width^2) with
// amplitude < 0 (focusing). Positive amplitudes are allowed for defocusing
// sanity tests; the estimate-checking paths require the focusing hypotheses.

#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace meanfield {

struct interaction_spec {
    std::string family = "gaussian";
    double amplitude = -1.0;  // focusing: amplitude = -lambda < 0
    double width = 1.0;
    double beta = 0.1;  // in (0,1); the derivation needs beta < 1/6
    int n_particles = 2;

    void validate() const {
        if (family != "gaussian" && family != "zero")
            throw std::invalid_argument("interaction_spec: unknown family '" + family + "'");
        if (!(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("interaction_spec: beta must lie in (0,1)");
        if (n_particles < 1) throw std::invalid_argument("interaction_spec: N >= 1 required");
        if (width <= 0.0) throw std::invalid_argument("interaction_spec: width must be positive");
    }

    bool beyond_derivation_range() const { return beta >= 1.0 / 6.0; }
    bool is_zero() const { return family == "zero" || amplitude == 0.0; }
    bool focusing() const { return !is_zero() && amplitude < 0.0; }

    double v(double x, double y) const {
        if (is_zero()) return 0.0;
        return amplitude * std::exp(-(x * x + y * y) / (width * width));
    }
    double v_scaled(double x, double y) const {
        const double s = std::pow(double(n_particles), beta);
        return s * s * v(s * x, s * y);
    }

    double v_l1() const { return is_zero() ? 0.0 : std::abs(amplitude) * M_PI * width * width; }
    double v_linf() const { return is_zero() ? 0.0 : std::abs(amplitude); }
    /// Coupling constant of the limiting NLS, b0 = |int V|.
    double b0() const { return v_l1(); }

    /// V_N as an axis-separable gaussian: V_N(x) = scaled_amplitude * prod_axis e^{-scaled_rate u^2}.
    double scaled_rate() const {
        const double nb = std::pow(double(n_particles), 2.0 * beta);
        return nb / (width * width);
    }
    double scaled_amplitude() const {
        return amplitude * std::pow(double(n_particles), 2.0 * beta);
    }

    /// Derivation hypotheses on the profile (even, nonpositive, rapidly decaying),
    /// checked by sampling. Throws if violated.
    void check_focusing_hypotheses() const {
        validate();
        if (is_zero()) return;
        if (amplitude > 0.0)
            throw std::invalid_argument("interaction_spec: focusing hypotheses need V <= 0");
        for (double r : {0.3, 0.9, 1.7, 2.5}) {
            if (std::abs(v(r, 0.4) - v(-r, -0.4)) > 1e-14)
                throw std::logic_error("interaction_spec: V not even");
            if (v(r, 0.0) > 0.0) throw std::logic_error("interaction_spec: V not nonpositive");
        }
        if (std::abs(v(8.0 * width, 0.0)) > 1e-20 * std::abs(amplitude))
            throw std::logic_error("interaction_spec: V not rapidly decaying");
    }

    nlohmann::json to_json() const {
        return {{"family", family}, {"amplitude", amplitude}, {"width", width},
                {"beta", beta},     {"N", n_particles}};
    }
    static interaction_spec from_json(const nlohmann::json& j) {
        interaction_spec s;
        s.family = j.value("family", std::string("gaussian"));
        s.amplitude = j.at("amplitude").get<double>();
        s.width = j.value("width", 1.0);
        s.beta = j.at("beta").get<double>();
        s.n_particles = j.at("N").get<int>();
        s.validate();
        return s;
    }
};

}  // namespace meanfield
