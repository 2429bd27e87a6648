#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ecav/wavesolver.hpp"

using namespace ecav;
using namespace ecav::specfun;

namespace {

// Analytic eigenvalues of the single/double layer operators on the unit
// circle, density e^{i m theta}:
//   S: (i pi/2) J_m(k) H_m(k)
//   D: (i pi k/2) J'_m(k) H_m(k) - 1/2
cd s_eig(int m, cd k) { return cd(0, M_PI / 2.0) * bessel_j(m, k) * hankel1(m, k); }
cd d_eig(int m, cd k) {
    return cd(0, M_PI * 0.5) * k * bessel_j_prime(m, k) * hankel1(m, k) - 0.5;
}

}  // namespace

TEST_CASE("layer operators reproduce circle eigenvalues") {
    auto g = make_ellipse(0.0, 1.0);
    auto grid = make_boundary_grid(g, 64);
    for (cd k : {cd(5.0, 0.0), cd(6.4, -0.3)}) {
        MatrixXcd S, D;
        assemble_layer_operators(grid, k, S, D);
        for (int m : {0, 1, 3, 7}) {
            VectorXcd em(grid.N);
            for (int j = 0; j < grid.N; ++j)
                em(j) = std::exp(cd(0, m * grid.t[j]));
            const VectorXcd Se = S * em, De = D * em;
            for (int j = 0; j < grid.N; ++j) {
                CHECK(std::abs(Se(j) - s_eig(m, k) * em(j)) < 1e-9);
                CHECK(std::abs(De(j) - d_eig(m, k) * em(j)) < 1e-9);
            }
        }
    }
}

TEST_CASE("kernel k-derivatives match finite differences") {
    auto g = make_ellipse(0.35, 1.0);
    auto grid = make_boundary_grid(g, 32);
    const Parity par{Sign::odd, Sign::even};
    const cd k(4.0, -0.1), h(1e-6, 0.0);
    const auto B = assemble_folded(grid, k, par);
    const auto Bp = assemble_folded(grid, k + h, par);
    const auto Bm = assemble_folded(grid, k - h, par);
    const MatrixXcd fdS = (Bp.S - Bm.S) / (2.0 * h.real());
    const MatrixXcd fdD = (Bp.D - Bm.D) / (2.0 * h.real());
    CHECK((fdS - B.dS).norm() / fdS.norm() < 1e-7);
    CHECK((fdD - B.dD).norm() / fdD.norm() < 1e-7);
}

TEST_CASE("dirichlet circle: singular exactly at the Bessel zero") {
    auto g = make_ellipse(0.0, 1.0);
    auto grid = make_boundary_grid(g, 64);
    const double j31 = circle_billiard_k({3, 1});
    const Parity par = parity_of({3, 1});
    const auto at_root = assemble_bem(grid, cd(j31, 0), 1.0, BoundaryCondition::dirichlet, par);
    const auto off = assemble_bem(grid, cd(j31 + 0.35, 0), 1.0, BoundaryCondition::dirichlet, par);
    const double s_root = smallest_singular(at_root.A).sigma / at_root.A.norm();
    const double s_off = smallest_singular(off.A).sigma / off.A.norm();
    CHECK(s_root < 1e-8);
    CHECK(s_off > 10.0 * s_root);
}

TEST_CASE("resonance_search recovers circle billiard eigenvalues") {
    auto g = make_ellipse(0.0, 1.0);
    CavityConfig cfg;
    auto r = resonance_search(g, cfg, BoundaryCondition::dirichlet, cd(6.38, 0.0), {3, 1},
                              parity_of({3, 1}));
    CHECK(std::abs(r.kR.real() - circle_billiard_k({3, 1})) < 1e-8);
    CHECK(std::abs(r.kR.imag()) < 1e-8);
    CHECK(r.residual < 1e-8);
    // Dirichlet boundary data: psi identically zero, max |dnu psi| = 1
    double pmax = 0.0;
    for (auto& v : r.psi) pmax = std::max(pmax, std::abs(v));
    CHECK(pmax == 0.0);
    double dmax = 0.0;
    for (auto& v : r.dnu_psi) dmax = std::max(dmax, std::abs(v));
    CHECK(dmax == Catch::Approx(1.0));
}

TEST_CASE("circle cavity matching roots") {
    const cd z31 = circle_cavity_k({3, 1}, 3.3);
    CHECK(z31.imag() < 0.0);
    CHECK(std::abs(circle_matching({3, 1}, 3.3, z31)) < 1e-10);
    // high-index limit: as n -> inf the matching condition reduces, via the
    // small-argument Hankel ratio H'_m/H_m -> -m/z, to
    //   J'_m(u) + (m/u) J_m(u) = u^{-m} d/du [u^m J_m(u)] = J_{m-1}(u) = 0,
    // so kR -> j_{m-1,l}/n
    for (ModeLabel lb : {ModeLabel{3, 1}, ModeLabel{5, 5}}) {
        const cd zbig = circle_cavity_k(lb, 100.0);
        const double lim = bessel_zero(lb.m - 1, lb.ell) / 100.0;
        CHECK(std::abs(zbig.real() - lim) / lim < 0.001);
    }
    // the reflected point solves the conjugated condition
    CHECK(std::abs(std::conj(circle_matching({3, 1}, 3.3, z31))) < 1e-10);
}

TEST_CASE("resonance_search matches the dielectric circle oracle") {
    auto g = make_ellipse(0.0, 1.0);
    CavityConfig cfg;
    const cd oracle = circle_cavity_k({3, 1}, cfg.n);
    auto r = resonance_search(g, cfg, BoundaryCondition::dielectricTM, oracle + cd(0.01, 0.002),
                              {3, 1}, parity_of({3, 1}));
    CHECK(std::abs(r.kR.real() - oracle.real()) < 1e-6);
    CHECK(std::abs(r.kR.imag() - oracle.imag()) < 1e-6);
    CHECK(r.kR.imag() < 0.0);
}

TEST_CASE("continuity in eccentricity near the circle") {
    CavityConfig cfg;
    auto g = make_ellipse(0.01, 1.0);
    for (ModeLabel label : {ModeLabel{3, 1}, ModeLabel{0, 1}}) {
        const double seed = circle_billiard_k(label);
        auto r = resonance_search(g, cfg, BoundaryCondition::dirichlet, cd(seed, 0), label,
                                  parity_of(label));
        CHECK(std::abs(r.kR.real() - seed) / seed < 0.005);
        CHECK(std::abs(r.kR.imag()) < 1e-8);
    }
}

TEST_CASE("parity-reduced and full-boundary roots agree") {
    auto g = make_ellipse(0.2, 1.0);
    CavityConfig cfg;
    cfg.boundary_elements = 64;
    const ModeLabel label{3, 1};
    auto r = resonance_search(g, cfg, BoundaryCondition::dirichlet,
                              cd(circle_billiard_k(label), 0), label, parity_of(label));
    // the unfolded single layer must be singular at the folded root
    auto grid = make_boundary_grid(g, 64);
    MatrixXcd S, D;
    assemble_layer_operators(grid, r.kR, S, D);
    CHECK(smallest_singular(S).sigma / S.norm() < 1e-8);
    // and clearly regular a short distance away
    assemble_layer_operators(grid, r.kR + cd(0.05, 0.0), S, D);
    CHECK(smallest_singular(S).sigma / S.norm() > 1e-5);
}

TEST_CASE("quality factor definition and guards") {
    Resonance r;
    r.kind = SolveKind::open;
    r.kR = cd(5.0, -0.001);
    CHECK(quality_factor(r) == Catch::Approx(1250.0));
    r.kR = cd(5.0, -0.5);
    CHECK(quality_factor(r) == Catch::Approx(2.5));
    r.kind = SolveKind::closed;
    CHECK_THROWS_AS(quality_factor(r), std::domain_error);
}

TEST_CASE("field map symmetry and asymptotics") {
    auto g = make_ellipse(0.0, 1.0);
    CavityConfig cfg;
    const ModeLabel label{7, 1};
    const cd oracle = circle_cavity_k(label, cfg.n);
    auto r = resonance_search(g, cfg, BoundaryCondition::dielectricTM, oracle, label,
                              parity_of(label));

    // parity of |field| under reflections
    auto fm = field_map(r, -0.8, 0.8, -0.8, 0.8, 8, 8);
    for (int iy = 0; iy < 8; ++iy)
        for (int ix = 0; ix < 8; ++ix) {
            const cd v = fm.values[iy * 8 + ix];
            const cd vx = fm.values[iy * 8 + (7 - ix)];
            const cd vy = fm.values[(7 - iy) * 8 + ix];
            CHECK(std::abs(std::abs(v) - std::abs(vx)) < 1e-6);
            CHECK(std::abs(std::abs(v) - std::abs(vy)) < 1e-6);
        }

    // interior intensity peaks at the first maximum of J_m(n k r), just
    // outside the semiclassical caustic radius m/(n Re kR)
    const double r_caustic = label.m / (cfg.n * r.kR.real());
    double peak_r = 0.0, peak_v = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double rad = 0.02 + 0.96 * i / 400.0;
        const double v = std::abs(std::cyl_bessel_j(label.m, cfg.n * r.kR.real() * rad));
        if (v > peak_v) {
            peak_v = v;
            peak_r = rad;
        }
    }
    CHECK(peak_r > r_caustic);
    double best_r = 0.0, best_v = 0.0;
    for (int i = 0; i < 160; ++i) {
        const double rad = 0.02 + 0.96 * i / 160.0;
        auto one = field_map(r, rad * std::cos(0.3), rad * std::cos(0.3) + 1e-6,
                             rad * std::sin(0.3), rad * std::sin(0.3) + 1e-6, 1, 1);
        const double v = std::abs(one.values[0]);
        if (v > best_v) {
            best_v = v;
            best_r = rad;
        }
    }
    CHECK(std::abs(best_r - peak_r) < 0.02);
    CHECK(best_r > r_caustic - 0.02);

    // exterior decay ~ r^{-1/2} along a ray
    auto amp = [&](double rad) {
        auto one = field_map(r, rad, rad + 1e-6, 0.21, 0.21 + 1e-6, 1, 1);
        return std::abs(one.values[0]);
    };
    const double a3 = amp(3.0) * std::sqrt(3.0), a6 = amp(6.0) * std::sqrt(6.0);
    CHECK(std::abs(a3 - a6) / a3 < 0.2);
}

TEST_CASE("configuration guards") {
    auto g = make_ellipse(0.0, 1.0);
    CHECK_THROWS(make_boundary_grid(g, 30));
    CHECK_THROWS(circle_cavity_k({3, 1}, 1.0));
}
