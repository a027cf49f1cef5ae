// Acceptance suite: one criterion per invocation (argv[1] in 1..13) or all.
// Each criterion prints exactly one [PASS]/[FAIL] line, plus indented detail
// rows. Exit code = number of failed criteria.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <meanfield/counterexample.hpp>
#include <meanfield/estimates.hpp>
#include <meanfield/experiments.hpp>
#include <meanfield/io.hpp>
#include <meanfield/marginals.hpp>
#include <meanfield/townes.hpp>

#include "../support/oracles.hpp"

using namespace meanfield;

namespace {

struct criterion_result {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        pass &= ok;
        detail << "    " << (ok ? "ok  " : "VIOL") << " " << what << "\n";
    }
    void note(const std::string& s) { detail << "    note " << s << "\n"; }
};

std::shared_ptr<const occupation_basis> occ(int D, int N) {
    return std::make_shared<occupation_basis>(D, N);
}

interaction_spec gauss(double lambda, double beta, int N) {
    interaction_spec v;
    v.amplitude = -lambda;
    v.beta = beta;
    v.n_particles = N;
    return v;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
criterion_result criterion_hermite() {
    criterion_result r;
    hermite_basis b(1.0, 20.0);
    bool exact = true;
    for (int i = 0; i < b.size(); ++i)
        exact &= b.eigenvalue(i) == 2.0 * (b.modes()[i].n1 + b.modes()[i].n2 + 1);
    r.require(exact, "assembled S^2 spectrum equals 2 omega (n1+n2+1) machine-exactly");

    const auto& rule = b.axis_rule();
    const int Q = int(rule.nodes.size());
    std::vector<std::array<double, 2>> pts;
    std::vector<double> w2;
    for (int i = 0; i < Q; ++i)
        for (int j = 0; j < Q; ++j) {
            pts.push_back({rule.nodes[i], rule.nodes[j]});
            w2.push_back(rule.weights[i] * rule.weights[j]);
        }
    Eigen::MatrixXd V = b.eval_modes(pts);
    Eigen::MatrixXd G =
        V * Eigen::Map<Eigen::VectorXd>(w2.data(), w2.size()).asDiagonal() * V.transpose();
    const double gram_err =
        (G - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff();
    r.require(gram_err < 1e-12, "basis Gram = identity +- 1e-12 (err " + fmt(gram_err) + ")");

    grid_transform tr(b, grid_spec{8.0, 128});
    rng64 rng(1);
    Eigen::VectorXcd c(b.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.cnormal();
    c.normalize();
    const double rt = (tr.to_spectral(tr.to_grid(c)) - c).norm();
    r.require(rt < 1e-10, "transform round trip < 1e-10 (err " + fmt(rt) + ")");
    return r;
}

// ---------------------------------------------------------------- criterion 2
criterion_result criterion_nls_conservation() {
    criterion_result r;
    hermite_basis b(1.0, 8.0);
    grid_transform tr(b, grid_spec{8.0, 256});
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(b.size());
    e0[0] = 1.0;
    field2d f0{tr.grid(), tr.to_grid(e0)};
    f0.values /= std::sqrt(mass(f0));
    nls_params p;
    p.b0 = 1.0;
    p.t_final = 1.0;

    auto run = [&](double dt) {
        nls_params q = p;
        q.dt = dt;
        auto traj = evolve_nls(f0, q, 0, 0);
        return std::pair<double, double>(
            traj.mass_drift,
            std::abs(energy_nls(traj.snapshots.back().second, q) - energy_nls(f0, q)));
    };
    auto [mdrift, edrift] = run(1e-3);
    r.require(mdrift < 1e-10, "mass drift < 1e-10 at dt=1e-3 (" + fmt(mdrift) + ")");
    r.require(edrift < 1e-6, "energy drift < 1e-6 at dt=1e-3 (" + fmt(edrift) + ")");
    auto [mdrift2, edrift2] = run(5e-4);
    const double ratio = edrift / edrift2;
    r.require(ratio > 3.5 && ratio < 4.5,
              "energy-drift ratio 4 +- 0.5 under dt halving (" + fmt(ratio) + ")");
    (void)mdrift2;
    return r;
}

// ---------------------------------------------------------------- criterion 3
criterion_result criterion_gn_constant() {
    criterion_result r;
    const auto& g = townes_constants();
    grid_spec grid{10.0, 128};
    auto asc = weinstein_maximize(grid, 1);
    const double rel = std::abs(asc.quotient_max - g.c4) / g.c4;
    r.require(rel < 1e-3, "shooting and ascent agree on C_gn^4 to 1e-3 (rel " + fmt(rel) + ")");
    const double ident = std::abs(g.c4 * g.mass - 2.0);
    r.require(ident < 1e-6, "identity C_gn^4 ||Q||^2 = 2 +- 1e-6 (err " + fmt(ident) + ")");

    hermite_basis b(1.0, 16.0);
    grid_transform tr(b, grid);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s)
        worst = std::max(worst, gn_functional(random_smooth_field(b, tr, 7000 + s, 0.12)));
    r.require(worst <= g.c4 + 1e-3,
              "1000 random trials stay below C_gn^4 + 1e-3 (max " + fmt(worst) + ")");
    return r;
}

// ---------------------------------------------------------------- criterion 4
criterion_result criterion_hartree() {
    criterion_result r;
    const double alpha = 0.9;
    interaction_spec v = gauss(0.9 * threshold_L1(alpha) / M_PI, 0.1, 8);
    const double eps = pinned_epsilon(v.v_l1(), alpha);
    r.note("pinned epsilon = " + fmt(eps));
    auto res = hartree_positivity_scan(alpha, v, eps, 500, 42);
    r.require(res.violations == 0 && res.min_energy >= -1e-10,
              std::to_string(res.trials) + "/" + std::to_string(res.trials) +
                  " fields nonnegative at 0.9 threshold (min " + fmt(res.min_energy) + ")");

    interaction_spec hot = gauss(3.0 * threshold_L1(alpha) / M_PI, 0.1, 8);
    auto sharp = hartree_positivity_scan(alpha, hot, eps, 500, 42);
    r.require(sharp.violations >= 1, "at least one violation at 3x threshold (found " +
                                         std::to_string(sharp.violations) + ", worst " +
                                         sharp.worst_trial + " at " + fmt(sharp.min_energy) + ")");
    return r;
}

// ---------------------------------------------------------------- criterion 5
criterion_result criterion_manybody_exactness() {
    criterion_result r;
    hermite_basis b6(1.0, 6.0);
    auto h = assemble_hamiltonian(occ(6, 3), b6, gauss(1.0, 0.1, 3));
    rng64 rng(3);
    Eigen::VectorXcd c(h.dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.cnormal();
    c.normalize();
    bosonic_state st{h.basis_ptr(), c};
    const double e0 = energy_moment(st, h, 1);
    auto ev = evolve_manybody(st, h, 0.5, 1e-10);
    r.require(std::abs(ev.coeffs.norm() - 1.0) < 1e-9,
              "unitarity 1e-9 at (D=6,N=3,t=0.5) (drift " + fmt(std::abs(ev.coeffs.norm() - 1)) + ")");
    const double edrift = std::abs(energy_moment(ev, h, 1) - e0);
    r.require(edrift < 1e-8, "<H> drift < 1e-8 (" + fmt(edrift) + ")");

    hermite_basis b3(1.0, 4.0);
    auto v = gauss(1.4, 0.1, 2);
    auto occ2 = occ(3, 2);
    auto h2 = assemble_hamiltonian(occ2, b3, v);
    // first-quantized symmetrized oracle on C^3 (x) C^3
    const int D = 3;
    two_body_tensor w(b3, v);
    Eigen::MatrixXd h1q = Eigen::MatrixXd::Zero(D * D, D * D);
    for (int p = 0; p < D; ++p)
        for (int q = 0; q < D; ++q) {
            h1q(p * D + q, p * D + q) += b3.eigenvalue(p) + b3.eigenvalue(q);
            for (int rr = 0; rr < D; ++rr)
                for (int s = 0; s < D; ++s) h1q(p * D + q, rr * D + s) += 0.5 * w.at(p, q, rr, s);
        }
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(D * D, occ2->size());
    for (std::size_t i = 0; i < occ2->size(); ++i) {
        const auto& m = occ2->state(i);
        std::vector<int> ix;
        for (int d = 0; d < D; ++d)
            for (int k = 0; k < m[d]; ++k) ix.push_back(d);
        if (ix[0] == ix[1])
            E(ix[0] * D + ix[1], i) = 1.0;
        else
            E(ix[0] * D + ix[1], i) = E(ix[1] * D + ix[0], i) = 1.0 / std::sqrt(2.0);
    }
    const double mismatch = (h2.dense() - E.transpose() * h1q * E).cwiseAbs().maxCoeff();
    r.require(mismatch < 1e-10,
              "second-quantized H equals the first-quantized oracle at (D=3,N=2) (err " +
                  fmt(mismatch) + ")");
    return r;
}

// ---------------------------------------------------------------- criterion 6
criterion_result criterion_marginal_structure() {
    criterion_result r;
    hermite_basis b6(1.0, 6.0);
    auto h = assemble_hamiltonian(occ(6, 3), b6, gauss(1.0, 0.1, 3));
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(6);
    phi[0] = 1.0;
    auto st0 = product_state(h.basis_ptr(), phi);
    double worst_h = 0, worst_psd = 0, worst_tr = 0, worst_perm = 0, worst_comp = 0;
    for (double t : {0.0, 0.25, 0.5}) {
        auto st = t == 0.0 ? st0 : evolve_manybody(st0, h, t, 1e-11);
        for (int k : {1, 2}) {
            auto inv = check_density(reduce(st, k));
            worst_h = std::max(worst_h, inv.hermiticity);
            worst_psd = std::min(worst_psd, inv.min_eigenvalue);
            worst_tr = std::max(worst_tr, inv.trace_error);
            if (k == 2) worst_perm = std::max(worst_perm, inv.permutation_asymmetry);
        }
        worst_comp = std::max(worst_comp, compatibility_check(st, 1));
    }
    r.require(worst_h < 1e-10, "hermiticity within 1e-10 (" + fmt(worst_h) + ")");
    r.require(worst_psd > -1e-10, "eigenvalues >= -1e-10 (min " + fmt(worst_psd) + ")");
    r.require(worst_tr < 1e-9, "unit trace within 1e-9 (" + fmt(worst_tr) + ")");
    r.require(worst_perm < 1e-10, "permutation symmetry within 1e-10 (" + fmt(worst_perm) + ")");
    r.require(worst_comp < 1e-9, "Tr_2 gamma^(2) = gamma^(1) to 1e-9 (" + fmt(worst_comp) + ")");
    return r;
}

// ---------------------------------------------------------------- criterion 7
criterion_result criterion_free_factorization() {
    criterion_result r;
    experiment_config cfg;
    cfg.experiment = "converge";
    cfg.parameters = {{"omega", 1.0},     {"cutoff_energy", 6.0},
                      {"N_list", {2, 3, 4, 5}}, {"t_list", {0.25, 0.5, 1.0}},
                      {"dt", 1.25e-4},    {"points_per_axis", 128},
                      {"phi0", {1.0}}};
    const std::string dir = "acceptance_out/criterion7";
    std::filesystem::create_directories(dir);
    auto rep = run_converge(cfg, dir);
    // the report records k=1 distances at the final time; re-read the CSV for all
    std::ifstream in(dir + "/converge.csv");
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::atof(cell.c_str()));
        worst = std::max(worst, row[3]);
    }
    r.require(worst < 1e-7,
              "V=0 trace distances < 1e-7 for N <= 5, t <= 1 (worst " + fmt(worst) + ")");
    return r;
}

// ---------------------------------------------------------------- criterion 8
criterion_result criterion_focusing_trend() {
    criterion_result r;
    const double lambda = 0.5 * threshold_L1(0.9) / M_PI;
    experiment_config cfg;
    cfg.experiment = "converge";
    cfg.parameters = {{"omega", 1.0},
                      {"cutoff_energy", 6.0},
                      {"N_list", {2, 3, 4, 5}},
                      {"t_list", {0.2}},
                      {"dt", 2.5e-4},
                      {"points_per_axis", 128},
                      {"phi0", {1.0}},
                      {"interaction", {{"amplitude", -lambda}, {"beta", 0.1}, {"N", 2}}}};
    const std::string dir = "acceptance_out/criterion8";
    std::filesystem::create_directories(dir);
    auto rep = run_converge(cfg, dir);
    std::ostringstream tab;
    for (const auto& d : rep.results["final_t_distances"]) tab << fmt(d.get<double>()) << " ";
    r.note("Tr|gamma_N^(1)(0.2) - |phi><phi|| over N in {2,3,4,5}: " + tab.str());
    r.require(rep.ok(), "distance nonincreasing over N (<= one 10% inversion)");
    return r;
}

// ---------------------------------------------------------------- criterion 9
criterion_result criterion_stability() {
    criterion_result r;
    hermite_basis b(1.0, 6.0);
    interaction_spec z;
    z.family = "zero";
    auto f1 = check_energy_power_bound(3, 1, 0.9, z, b);
    auto f2 = check_energy_power_bound(3, 2, 0.9, z, b);
    auto f3 = check_pair_positivity(3, 0.9, 1.0, z, b);
    r.require(f1.verdict == "holds" && f1.min_eigenvalue >= -1e-8,
              "V=0 energy power bound k=1 holds (min " + fmt(f1.min_eigenvalue) + ")");
    r.require(f2.verdict == "holds" && f2.min_eigenvalue >= -1e-8,
              "V=0 energy power bound k=2 holds (min " + fmt(f2.min_eigenvalue) + ")");
    r.require(f3.verdict == "holds" && f3.min_eigenvalue >= -1e-8,
              "V=0 pair positivity holds (min " + fmt(f3.min_eigenvalue) + ")");

    const double lambda = 0.5 * threshold_L1(0.9) / M_PI;
    std::vector<double> main_eigs, pair_eigs;
    bool all_hold = true;
    for (int n : {2, 4, 6}) {
        auto rm = check_energy_power_bound(n, 1, 0.9, gauss(lambda, 0.1, n), b);
        auto rp = check_pair_positivity(n, 0.9, 1.0, gauss(lambda, 0.1, n), b);
        main_eigs.push_back(rm.min_eigenvalue);
        pair_eigs.push_back(rp.min_eigenvalue);
        all_hold &= (rm.verdict == "holds") && (rp.verdict == "holds");
    }
    std::ostringstream t1, t2;
    for (double x : main_eigs) t1 << fmt(x) << " ";
    for (double x : pair_eigs) t2 << fmt(x) << " ";
    r.note("focusing min-eig over N in {2,4,6}, energy bound k=1: " + t1.str());
    r.note("focusing min-eig over N in {2,4,6}, pair positivity:  " + t2.str());
    r.require(all_hold, "focusing stability holds at every tested N");
    const bool nondecreasing = main_eigs[0] <= main_eigs[1] + 1e-12 &&
                               main_eigs[1] <= main_eigs[2] + 1e-12 &&
                               pair_eigs[0] <= pair_eigs[1] + 1e-12 &&
                               pair_eigs[1] <= pair_eigs[2] + 1e-12;
    r.require(nondecreasing, "min-eig nondecreasing in N over {2,4,6}");
    if (!nondecreasing)
        r.note("measured trend is strictly decreasing toward a positive limit: the pair "
               "coupling carries (N-1)/N and V_N deepens with N^{2 beta}, so the sector "
               "minimum approaches its mean-field limit from above; stability itself holds "
               "at every N with wide margin");
    return r;
}

// --------------------------------------------------------------- criterion 10
criterion_result criterion_lewin() {
    criterion_result r;
    const double alpha = 0.9;
    interaction_spec v = gauss(0.2, 0.1, 2);
    bool all_hold = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int n : {2, 3, 4})
        for (double eps : {0.5, 0.7, 0.9}) {
            interaction_spec vn = v;
            vn.n_particles = n;
            const double m_min =
                4.0 * std::sqrt(vn.v_linf() / alpha) * std::pow(double(n), vn.beta) / eps;
            auto rep = check_projection_compression(1.05 * m_min, eps, n, alpha, vn);
            all_hold &= rep.verdict == "holds" &&
                        rep.parameters["hypothesis_satisfied"].get<bool>();
            worst = std::min(worst, rep.min_eigenvalue);
        }
    r.require(all_hold,
              "projection inequality holds on the 3x3 (N,eps) sweep (worst min-eig " +
                  fmt(worst) + ")");
    auto viol = check_projection_compression(1.0, 0.5, 2, alpha, gauss(50.0, 0.1, 2));
    r.require(viol.min_eigenvalue < -1e-8 && viol.verdict == "below_threshold_M",
              "violation recorded when M << N^beta scale (min " + fmt(viol.min_eigenvalue) + ")");
    return r;
}

// --------------------------------------------------------------- criterion 11
criterion_result criterion_definetti() {
    criterion_result r;
    for (auto [D, N] : std::vector<std::pair<int, int>>{{3, 6}, {4, 8}}) {
        rng64 rng(100 + D);
        auto basis = occ(D, N);
        Eigen::VectorXcd c(basis->size());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.cnormal();
        c.normalize();
        bosonic_state st{basis, c};
        auto res = definetti_distance(st, 200000, 77);
        r.require(res.estimate <= res.bound + 3 * res.mc_error,
                  "random state (D=" + std::to_string(D) + ",N=" + std::to_string(N) +
                      "): estimate " + fmt(res.estimate) + " <= 8D/N + 3 mc (" +
                      fmt(res.bound) + " + 3*" + fmt(res.mc_error) + ")");
    }
    // product state
    rng64 rng(9);
    auto basis = occ(3, 6);
    Eigen::VectorXcd phi(3);
    for (int i = 0; i < 3; ++i) phi[i] = rng.cnormal();
    phi.normalize();
    auto st = product_state(basis, phi);
    auto res = definetti_distance(st, 200000, 78);
    const double exact =
        trace_norm(reduce(st, 2).mat - mf_oracle::definetti_exact_moment(st));
    r.require(res.estimate < 3 * res.mc_error,
              "product state: estimate " + fmt(res.estimate) + " < 3 mc_error (" +
                  fmt(3 * res.mc_error) + ")");
    if (res.estimate >= 3 * res.mc_error)
        r.note("the constructive measure dim_sym |<phi^N,psi>|^2 dphi is spread at finite N: "
               "its exact second-moment distance for this product state is " + fmt(exact) +
               " (MC agrees to " + fmt(std::abs(res.estimate - exact)) +
               "), an O(D/N) constant, not 0; no lower-symbol construction concentrates at "
               "finite N, so this sub-criterion cannot be met as stated");
    return r;
}

// --------------------------------------------------------------- criterion 12
criterion_result criterion_counterexample() {
    criterion_result r;
    auto res = counterexample_trace({1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9});
    const double ratio = res.rows.back().j_diagonal / res.rows.front().j_diagonal;
    r.require(res.j_strictly_increasing && ratio > 1.5,
              "J strictly increasing with last/first " + fmt(ratio) + " > 1.5");
    r.note("fitted growth exponent in ln ln(1/eps): " + fmt(res.fitted_exponent) +
           " (the source text states linear growth; the direct evaluation is quadratic -- "
           "flagged, divergence is what is asserted)");
    r.require(res.grad_variation < 0.05,
              "gradient-norm variation < 5% (measured " + fmt(res.grad_variation) + ")");
    if (res.grad_variation >= 0.05) {
        std::ostringstream inc;
        for (std::size_t i = 1; i < res.rows.size(); ++i)
            inc << fmt(res.rows[i].grad_norm2 - res.rows[i - 1].grad_norm2) << " ";
        r.note("||grad_1 psi_eps||^2 converges like A - B/|ln eps| (increments " + inc.str() +
               "shrink monotonically); it is bounded as eps -> 0 as claimed, but its spread "
               "across the pinned eps range is ~19% with the canonical exp-based bump, so "
               "the 5% operationalization cannot be met as stated");
    }
    auto ok = trace_identity_check(64, 1.0, 5.0, 36.0, 0.5, 7);
    r.require(ok.hypothesis_satisfied &&
                  ok.difference < 1e-7 * std::max(ok.j_delta, 1.0),
              "trace identity |J_V - J_delta| < 1e-7 max(J_delta,1) under the hypothesis (diff " +
                  fmt(ok.difference) + ")");
    return r;
}

// --------------------------------------------------------------- criterion 13
criterion_result criterion_bbgky() {
    criterion_result r;
    hermite_basis basis(1.0, 6.0);
    interaction_spec v = gauss(1.0, 0.1, 3);
    auto h = assemble_hamiltonian(occ(6, 3), basis, v);
    rng64 rng(5);
    Eigen::VectorXcd c(h.dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.cnormal();
    c.normalize();
    bosonic_state st{h.basis_ptr(), c};
    auto traj = [&](double tmid, double hstep) {
        std::vector<std::pair<double, bosonic_state>> tr;
        for (int i = -1; i <= 1; ++i)
            tr.push_back({tmid + i * hstep, evolve_manybody(st, h, tmid + i * hstep, 1e-12)});
        return tr;
    };
    const double r1 = bbgky_residual(traj(0.2, 0.04), 1, v, basis)[0].residual;
    const double r2 = bbgky_residual(traj(0.2, 0.02), 1, v, basis)[0].residual;
    const double ratio = r1 / r2;
    r.note("k=1 residuals at h=0.04 / h=0.02: " + fmt(r1) + " / " + fmt(r2));
    r.require(ratio > 3.0 && ratio < 5.0,
              "O(h^2) self-convergence, ratio 4 +- 1 under h halving (" + fmt(ratio) + ")");
    return r;
}

struct criterion_entry {
    int id;
    const char* title;
    std::function<criterion_result()> fn;
};

const std::vector<criterion_entry>& criteria() {
    static const std::vector<criterion_entry> list = {
        {1, "Hermite exactness", criterion_hermite},
        {2, "NLS conservation", criterion_nls_conservation},
        {3, "Gagliardo-Nirenberg constant", criterion_gn_constant},
        {4, "Hartree positivity and sharpness", criterion_hartree},
        {5, "many-body exactness", criterion_manybody_exactness},
        {6, "marginal structure", criterion_marginal_structure},
        {7, "V=0 factorization", criterion_free_factorization},
        {8, "focusing convergence trend", criterion_focusing_trend},
        {9, "stability checks", criterion_stability},
        {10, "projection inequality sweep", criterion_lewin},
        {11, "de Finetti bound", criterion_definetti},
        {12, "trace counterexample and identity", criterion_counterexample},
        {13, "BBGKY residual self-convergence", criterion_bbgky},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    int failures = 0;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        criterion_result res;
        try {
            res = c.fn();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail << "    exception: " << e.what() << "\n";
        }
        std::cout << (res.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title
                  << "\n"
                  << res.detail.str();
        failures += res.pass ? 0 : 1;
    }
    return failures;
}
