#include <catch2/catch_amalgamated.hpp>

#include <meanfield/hermite.hpp>

using namespace meanfield;

TEST_CASE("mode enumeration follows the spectrum") {
    auto only_ground = enumerate_modes(1.0, 2.0);
    REQUIRE(only_ground.size() == 1);
    CHECK(only_ground[0] == mode2d{0, 0});

    auto m6 = enumerate_modes(1.0, 6.0);
    REQUIRE(m6.size() == 6);
    std::vector<mode2d> expect = {{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(m6[i] == expect[i]);

    CHECK(enumerate_modes(2.0, 8.0).size() == 3);
    CHECK_THROWS_AS(enumerate_modes(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("mode eigenvalues are 2*omega*(n1+n2+1), machine exact") {
    CHECK(mode_eigenvalue({0, 0}, 1.0) == 2.0);
    CHECK(mode_eigenvalue({1, 2}, 1.0) == 8.0);
    CHECK(mode_eigenvalue({0, 0}, 3.0) == 6.0);
    hermite_basis b(1.0, 12.0);
    for (int i = 0; i < b.size(); ++i)
        CHECK(b.eigenvalue(i) == 2.0 * (b.modes()[i].n1 + b.modes()[i].n2 + 1));
}

TEST_CASE("dim_leq counts the spectral ball and respects M^4 for omega >= 1/2") {
    CHECK(dim_leq(1.0, 2.0) == 3);
    CHECK(dim_leq(1.0, std::sqrt(2.0)) == 1);
    CHECK(dim_leq(1.0, 1.0) == 0);
    double prev = 0;
    for (double M = std::sqrt(2.0); M < 12.0; M += 0.37) {
        const double d = static_cast<double>(dim_leq(1.0, M));
        CHECK(d >= prev);
        CHECK(d <= M * M * M * M);
        prev = d;
    }
    // omega = 0.6 >= 1/2 also obeys the bound at these scales
    for (double M = 2.0; M < 10.0; M += 1.0) CHECK(double(dim_leq(0.6, M)) <= M * M * M * M);
}

TEST_CASE("mode evaluation: ground value, parity zeros, orthonormality") {
    hermite_basis b(1.0, 10.0);
    auto vals = b.eval_modes({{0.0, 0.0}});
    CHECK_THAT(vals(0, 0), Catch::Matchers::WithinAbs(1.0 / std::sqrt(M_PI), 1e-14));
    CHECK_THAT(vals(b.index_of({1, 0}), 0), Catch::Matchers::WithinAbs(0.0, 1e-14));

    // Gram matrix under the tensor quadrature = identity +- 1e-12
    const auto& rule = b.axis_rule();
    const int Q = static_cast<int>(rule.nodes.size());
    std::vector<std::array<double, 2>> pts;
    std::vector<double> w2;
    for (int i = 0; i < Q; ++i)
        for (int j = 0; j < Q; ++j) {
            pts.push_back({rule.nodes[i], rule.nodes[j]});
            w2.push_back(rule.weights[i] * rule.weights[j]);
        }
    Eigen::MatrixXd V = b.eval_modes(pts);
    Eigen::MatrixXd G = V * Eigen::Map<Eigen::VectorXd>(w2.data(), w2.size()).asDiagonal() * V.transpose();
    Eigen::MatrixXd err = G - Eigen::MatrixXd::Identity(b.size(), b.size());
    CHECK(err.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadrature integrates high-degree mode products exactly") {
    hermite_basis b(0.7, 30.0);  // degrees up to 20
    const auto& rule = b.axis_rule();
    Eigen::MatrixXd H = herm1d_values(b.max_degree(), b.omega(), rule.nodes);
    for (int m = 0; m <= b.max_degree(); m += 3)
        for (int n = 0; n <= b.max_degree(); n += 5) {
            double s = 0;
            for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
                s += rule.weights[i] * H(m, i) * H(n, i);
            CHECK_THAT(s, Catch::Matchers::WithinAbs(m == n ? 1.0 : 0.0, 1e-12));
        }
}

TEST_CASE("projector mask algebra") {
    hermite_basis b(1.0, 12.0);
    Eigen::VectorXd all = b.projector_leq(std::sqrt(b.cutoff_energy()) + 1.0);
    CHECK(all.minCoeff() == 1.0);
    Eigen::VectorXd none = b.projector_leq(1.0);
    CHECK(none.maxCoeff() == 0.0);
    Eigen::VectorXd mask = b.projector_leq(2.5);
    Eigen::VectorXd comp = Eigen::VectorXd::Ones(b.size()) - mask;
    CHECK((mask.array() * mask.array() - mask.array()).abs().maxCoeff() == 0.0);
    CHECK((mask.array() * comp.array()).abs().maxCoeff() == 0.0);
    // commutes with the diagonal S^2 action trivially; spot-check eigenvalue split
    for (int i = 0; i < b.size(); ++i)
        CHECK(mask[i] == ((b.eigenvalue(i) <= 2.5 * 2.5) ? 1.0 : 0.0));
}

TEST_CASE("apply_S_power") {
    hermite_basis b(1.0, 8.0);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(b.size());
    e0[0] = 1.0;
    CHECK(std::abs(b.apply_S_power(e0, 2.0)[0] - cd(2.0, 0)) < 1e-15);
    Eigen::VectorXcd c = Eigen::VectorXcd::Random(b.size());
    CHECK((b.apply_S_power(c, 0.0) - c).norm() < 1e-15);
    Eigen::VectorXcd back = b.apply_S_power(b.apply_S_power(c, 1.0), -1.0);
    CHECK((back - c).norm() < 1e-14 * c.norm());
    CHECK_THROWS_AS(b.apply_S_power(c, -2.5), std::invalid_argument);
}

TEST_CASE("grid transforms: round trip and projection") {
    hermite_basis b(1.0, 12.0);
    grid_spec grid{8.0, 128};
    grid_transform tr(b, grid);

    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(b.size());
    e0[0] = 1.0;
    auto f = tr.to_grid(e0);
    Eigen::VectorXcd back = tr.to_spectral(f);
    CHECK((back - e0).norm() < 1e-10);

    Eigen::VectorXcd c = Eigen::VectorXcd::Random(b.size());
    c.normalize();
    Eigen::VectorXcd rt = tr.to_spectral(tr.to_grid(c));
    CHECK((rt - c).norm() < 1e-10);

    // out-of-span field: second application of the projection is a fixed point
    Eigen::ArrayXXcd g = tr.to_grid(c);
    auto x = grid.axis();
    for (int i = 0; i < grid.points_per_axis; ++i)
        for (int j = 0; j < grid.points_per_axis; ++j)
            g(i, j) += 0.05 * std::exp(-0.1 * (x[i] * x[i] + x[j] * x[j])) * std::sin(3.0 * x[i]);
    Eigen::VectorXcd p1 = tr.to_spectral(g);
    Eigen::VectorXcd p2 = tr.to_spectral(tr.to_grid(p1));
    CHECK((p2 - p1).norm() < 1e-10 * p1.norm());
}

TEST_CASE("under-resolved grids are rejected at construction") {
    hermite_basis b(1.0, 30.0);
    CHECK_THROWS_AS(grid_transform(b, grid_spec{3.0, 64}), std::runtime_error);   // box too small
    CHECK_THROWS_AS(grid_transform(b, grid_spec{8.0, 16}), std::runtime_error);   // too coarse
    CHECK_NOTHROW(grid_transform(b, grid_spec{8.0, 128}));
}

TEST_CASE("json round trip") {
    hermite_basis b(1.3, 9.0);
    auto j = b.to_json();
    auto b2 = hermite_basis::from_json(j);
    CHECK(b2.size() == b.size());
    CHECK(b2.omega() == b.omega());
    CHECK(j["modes"].size() == static_cast<std::size_t>(b.size()));
}
