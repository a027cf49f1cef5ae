#include <catch2/catch_amalgamated.hpp>

#include <meanfield/nls.hpp>
#include <meanfield/townes.hpp>

using namespace meanfield;

namespace {

field2d mode_field(const hermite_basis& b, const grid_transform& tr, int index) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(b.size());
    c[index] = 1.0;
    return {tr.grid(), tr.to_grid(c)};
}

}  // namespace

TEST_CASE("mass: normalization, zero field, quadratic scaling") {
    hermite_basis b(1.0, 8.0);
    grid_spec grid{8.0, 128};
    grid_transform tr(b, grid);
    field2d f = mode_field(b, tr, 0);
    CHECK_THAT(mass(f), Catch::Matchers::WithinAbs(1.0, 1e-10));
    field2d z{grid, Eigen::ArrayXXcd::Zero(128, 128)};
    CHECK(mass(z) == 0.0);
    field2d f2{grid, 2.0 * f.values};
    CHECK_THAT(mass(f2), Catch::Matchers::WithinRel(4.0, 1e-12));
}

TEST_CASE("energy of the ground mode is the S^2 eigenvalue") {
    hermite_basis b(1.0, 8.0);
    grid_transform tr(b, grid_spec{8.0, 128});
    field2d f = mode_field(b, tr, 0);
    nls_params p;
    p.b0 = 0.0;
    CHECK_THAT(energy_nls(f, p), Catch::Matchers::WithinAbs(2.0, 1e-8));
    field2d z{tr.grid(), Eigen::ArrayXXcd::Zero(128, 128)};
    CHECK(energy_nls(z, p) == 0.0);
}

TEST_CASE("linear eigenstates acquire pure phases under evolve_nls") {
    hermite_basis b(1.0, 8.0);
    grid_transform tr(b, grid_spec{8.0, 128});
    nls_params p;
    p.b0 = 0.0;
    p.dt = 5e-4;
    p.t_final = 1.0;

    field2d f0 = mode_field(b, tr, 0);
    auto traj = evolve_nls(f0, p, 0, 0);
    const auto& ft = traj.snapshots.back().second;
    // |phi(t)| constant in t, global phase e^{-2it}
    CHECK((ft.values.abs() - f0.values.abs()).abs().maxCoeff() < 1e-7);
    cd overlap = (f0.values.conjugate() * ft.values).sum() * tr.grid().cell_area();
    CHECK(std::abs(overlap - std::polar(1.0, -2.0 * p.t_final)) < 1e-6);
    CHECK(traj.mass_drift < 1e-10);

    field2d f10 = mode_field(b, tr, b.index_of({1, 0}));
    auto traj2 = evolve_nls(f10, p, 0, 0);
    cd ov2 = (f10.values.conjugate() * traj2.snapshots.back().second.values).sum() *
             tr.grid().cell_area();
    CHECK(std::abs(ov2 - std::polar(1.0, -4.0 * p.t_final)) < 1e-6);
}

TEST_CASE("focusing run conserves mass and energy; drift is second order in dt") {
    hermite_basis b(1.0, 8.0);
    grid_transform tr(b, grid_spec{8.0, 256});
    field2d f0 = mode_field(b, tr, 0);
    nls_params p;
    p.b0 = 1.0;
    p.t_final = 1.0;

    auto drift = [&](double dt) {
        nls_params q = p;
        q.dt = dt;
        auto traj = evolve_nls(f0, q, 0, 0);
        const double e0 = energy_nls(f0, q);
        const double e1 = energy_nls(traj.snapshots.back().second, q);
        CHECK(traj.mass_drift < 1e-10);
        return std::abs(e1 - e0);
    };
    const double d1 = drift(1e-3);
    CHECK(d1 < 1e-6);
    const double d2 = drift(5e-4);
    const double ratio = d1 / d2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("gn_functional: scaling invariances and zero-field error") {
    hermite_basis b(1.0, 12.0);
    grid_transform tr(b, grid_spec{10.0, 256});
    field2d f = random_smooth_field(b, tr, 42);
    const double val = gn_functional(f);
    field2d fs{f.grid, 3.7 * f.values};
    CHECK_THAT(gn_functional(fs), Catch::Matchers::WithinRel(val, 1e-12));

    // dilation invariance on resolved grids
    auto x = tr.grid().axis();
    const int P = tr.grid().points_per_axis;
    auto make_gauss = [&](double s) {
        Eigen::ArrayXXcd g(P, P);
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j)
                g(i, j) = std::exp(-(x[i] * x[i] + x[j] * x[j]) / (2 * s * s));
        return field2d{tr.grid(), g};
    };
    CHECK_THAT(gn_functional(make_gauss(1.0)),
               Catch::Matchers::WithinRel(gn_functional(make_gauss(1.4)), 1e-8));
    // gaussian quotient is exactly 1/(2 pi), strictly below the sharp constant
    CHECK_THAT(gn_functional(make_gauss(1.0)), Catch::Matchers::WithinRel(1.0 / (2 * M_PI), 1e-9));

    field2d z{tr.grid(), Eigen::ArrayXXcd::Zero(P, P)};
    CHECK_THROWS_AS(gn_functional(z), std::invalid_argument);
}

TEST_CASE("pair energy against the closed-form gaussian convolution") {
    // ground mode phi (omega=1), V = -lambda e^{-|x|^2}, N=1: int (V*|phi|^2)|phi|^2 = -lambda/3
    hermite_basis b(1.0, 8.0);
    grid_transform tr(b, grid_spec{8.0, 256});
    field2d f = mode_field(b, tr, 0);
    interaction_spec v;
    v.amplitude = -0.8;
    v.n_particles = 1;
    CHECK_THAT(pair_energy_centered(f, v, false),
               Catch::Matchers::WithinAbs(-0.8 / 3.0, 1e-8));
    CHECK_THAT(pair_energy_centered(f, v, true),
               Catch::Matchers::WithinAbs(0.8 / 3.0, 1e-8));
}

TEST_CASE("hartree energy: V=0 reduces to 2 alpha <S^2>; pinned eps gives positivity") {
    hermite_basis b(1.0, 12.0);
    grid_transform tr(b, grid_spec{8.0, 128});
    field2d f = mode_field(b, tr, 0);
    interaction_spec zero;
    zero.family = "zero";
    const double alpha = 0.9;
    CHECK_THAT(hartree_energy(f, zero, alpha, 0.1, 1.0),
               Catch::Matchers::WithinAbs(2 * alpha * 2.0, 1e-7));

    // ||V||_1 = 0.5 * threshold: no normalized smooth sample may go negative
    interaction_spec v;
    v.beta = 0.1;
    v.n_particles = 4;
    v.amplitude = -0.5 * threshold_L1(alpha) / M_PI;
    const double eps = pinned_epsilon(v.v_l1(), alpha);
    for (std::uint64_t s = 0; s < 25; ++s) {
        field2d g = random_smooth_field(b, tr, 100 + s);
        CHECK(hartree_energy(g, v, alpha, eps, 1.0) >= -1e-10);
    }
}

TEST_CASE("threshold_L1 algebra") {
    const auto& g = townes_constants();
    // threshold identity: 2 alpha / C^4 = alpha ||Q||^2; alpha -> 1 limit is ||Q||^2
    CHECK_THAT(threshold_L1(0.9999999), Catch::Matchers::WithinRel(g.mass, 1e-5));
    CHECK_THAT(threshold_L1(0.7), Catch::Matchers::WithinRel(0.7 * g.mass, 1e-6));
    CHECK_THAT(threshold_L1(0.25), Catch::Matchers::WithinRel(0.5 * threshold_L1(0.5), 1e-9));
    CHECK(threshold_L1(0.6) > threshold_L1(0.3));
    CHECK_THROWS_AS(threshold_L1(1.5), std::invalid_argument);
}

TEST_CASE("under-resolved evolution aborts") {
    grid_spec grid{2.5, 32};
    const int P = grid.points_per_axis;
    auto x = grid.axis();
    Eigen::ArrayXXcd g(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j)
            g(i, j) = std::exp(-(x[i] * x[i] + x[j] * x[j]) / 2);
    field2d f{grid, g};
    f.values /= std::sqrt(mass(f));
    nls_params p;
    p.b0 = 30.0;
    p.dt = 1e-3;
    p.t_final = 2.0;
    CHECK_THROWS_AS(evolve_nls(f, p, 0, 0), std::runtime_error);
}
