#ifndef ECAV_WAVESOLVER_HPP
#define ECAV_WAVESOLVER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecav/bem.hpp"
#include "ecav/geometry.hpp"
#include "ecav/specfun.hpp"

namespace ecav {

/// Circle-mode label: azimuthal index m, radial index ell (>= 1). Labels are
/// assigned at e = 0 and transported by continuation afterwards.
struct ModeLabel {
    int m = 0;
    int ell = 1;

    bool operator==(const ModeLabel&) const = default;
};

/// Parity class of the cos(m theta) branch at e = 0.
inline Parity parity_of(const ModeLabel& label) {
    return {label.m % 2 == 0 ? Sign::even : Sign::odd, Sign::even};
}

enum class SolveKind { closed, open };

struct CavityConfig {
    double n = 3.3;               // refractive index (TM polarization)
    int boundary_elements = 0;    // full-boundary node count; 0 = auto
    double points_per_wavelength = 8.0;
    double root_tol = 1e-9;       // complex-plane Newton tolerance on kR
    double residual_tol = 1e-6;   // relative sigma_min accepted as a root
    double capture_radius = 0.5;  // max |kR - seed| before declaring escape
};

/// Node count satisfying the per-wavelength resolution rule for the interior
/// wavenumber, rounded to a multiple of 4.
inline int auto_element_count(const EllipseGeometry& g, double interior_kR,
                              const CavityConfig& cfg) {
    if (cfg.boundary_elements > 0) return cfg.boundary_elements;
    const double waves = std::abs(interior_kR) * g.perimeter() / (2.0 * M_PI * g.scale());
    int N = static_cast<int>(std::ceil(cfg.points_per_wavelength * waves));
    N = std::max(N, 64);
    return (N + 3) / 4 * 4;
}

/// One wave solution with its boundary data sampled on the full grid.
struct Resonance {
    cd kR{0.0, 0.0};
    ModeLabel label;
    Parity parity;
    SolveKind kind = SolveKind::closed;
    double e = 0.0;
    double R = 1.0;
    double n = 1.0;            // refractive index used (1 for closed)
    double residual = 0.0;     // relative sigma_min at convergence
    std::vector<double> s;     // normalized arclength of the boundary nodes
    std::vector<double> w;     // quadrature weight (arclength measure) per node
    std::vector<cd> psi;       // boundary wavefunction
    std::vector<cd> dnu_psi;   // outward normal derivative
};

inline double circle_billiard_k(const ModeLabel& label) {
    return specfun::bessel_zero(label.m, label.ell);
}

/// TM matching condition for the open circle:
///   n J'_m(n z) H_m(z) - J_m(n z) H'_m(z) = 0.
inline cd circle_matching(const ModeLabel& label, double n, cd z) {
    const int m = label.m;
    return n * specfun::bessel_j_prime(m, n * z) * specfun::hankel1(m, z) -
           specfun::bessel_j(m, n * z) * specfun::hankel1_prime(m, z);
}

/// Magnitude scale of the two matching terms, for a relative residual.
inline double circle_matching_scale(const ModeLabel& label, double n, cd z) {
    const int m = label.m;
    return std::abs(n * specfun::bessel_j_prime(m, n * z) * specfun::hankel1(m, z)) +
           std::abs(specfun::bessel_j(m, n * z) * specfun::hankel1_prime(m, z));
}

namespace wsdetail {

/// Radial node count of the interior circle solution J_m(n k r) on (0, R):
/// the number of Bessel zeros below the interior argument.
inline int radial_nodes(int m, double n_times_re_kR) {
    int count = 0;
    while (count < 40 && specfun::bessel_zero(m, count + 1) < n_times_re_kR) ++count;
    return count;
}

inline cd matching_polish(const ModeLabel& label, double n, cd z, double cap) {
    const double h = 1e-7;
    for (int it = 0; it < 100; ++it) {
        const cd f = circle_matching(label, n, z);
        const cd df = (circle_matching(label, n, z + h) - circle_matching(label, n, z - h)) /
                      (2.0 * h);
        cd step = -f / df;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        double lam = 1.0;
        const double f0 = std::abs(f) / circle_matching_scale(label, n, z);
        for (int bt = 0; bt < 10; ++bt) {
            const cd trial = z + lam * step;
            if (std::abs(circle_matching(label, n, trial)) /
                    circle_matching_scale(label, n, trial) <
                f0)
                break;
            lam *= 0.5;
        }
        z += lam * step;
        if (std::abs(lam * step) < 1e-13 * std::abs(z)) break;
    }
    return z;
}

}  // namespace wsdetail

/// The l-th TM resonance of the dielectric circle: roots of the matching
/// condition are scanned near the seed j_{m,l}/n and the one whose interior
/// solution has exactly l-1 radial nodes is returned.
inline cd circle_cavity_k(const ModeLabel& label, double n) {
    if (!(n > 1.0)) throw std::domain_error("circle_cavity_k: refractive index must exceed 1");
    const double seed = circle_billiard_k(label) / n;
    const double spacing = M_PI / n;  // same-m root spacing in kR
    const double x_lo = std::max(0.3 * seed, seed - 1.3 * spacing);
    const double x_hi = seed + 0.7 * spacing;
    const double y_probe = -0.2 / n;
    const int nsc = 140;
    std::vector<cd> roots;
    double prev2 = 1e300, prev1 = 1e300;
    double xprev1 = 0.0;
    for (int i = 0; i <= nsc; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / nsc;
        const cd probe(x, y_probe);
        const double f = std::abs(circle_matching(label, n, probe)) /
                         circle_matching_scale(label, n, probe);
        if (i >= 2 && prev1 < prev2 && prev1 < f) {
            cd z = wsdetail::matching_polish(label, n, cd(xprev1, y_probe),
                                                   2.0 * (x_hi - x_lo) / nsc);
            const double res = std::abs(circle_matching(label, n, z)) /
                               circle_matching_scale(label, n, z);
            bool dup = false;
            for (const cd& r : roots)
                if (std::abs(r - z) < 1e-8) dup = true;
            // widths below double precision can round to +0; clamp those
            if (z.imag() >= 0.0 && z.imag() < 1e-12) z.imag(-1e-300);
            if (!dup && res < 1e-10 && z.imag() < 0.0) roots.push_back(z);
        }
        prev2 = prev1;
        prev1 = f;
        xprev1 = x;
    }
    for (const cd& z : roots)
        if (wsdetail::radial_nodes(label.m, n * z.real()) == label.ell - 1) return z;
    throw std::runtime_error("circle_cavity_k: no root with the requested radial index (m=" +
                             std::to_string(label.m) + ", l=" + std::to_string(label.ell) + ")");
}

namespace wsdetail {

/// Map a full-grid node index to its quarter representative and parity sign.
inline std::pair<int, double> quarter_rep(int N, int j, Parity parity) {
    const double sx = sign_of(parity.x), sy = sign_of(parity.y);
    if (j < N / 4) return {j, 1.0};
    if (j < N / 2) return {N / 2 - 1 - j, sx};
    if (j < 3 * N / 4) return {j - N / 2, sx * sy};
    return {N - 1 - j, sy};
}

}  // namespace wsdetail

/// Complex-kR root search: Newton iteration on the smallest singular value of
/// the parity-reduced boundary-integral system, using the singular pair for
/// the analytic step  dk = -sigma / (u^H dA/dk v).
inline Resonance resonance_search(const EllipseGeometry& g, const CavityConfig& cfg,
                                  BoundaryCondition bc, cd k_seed, const ModeLabel& label,
                                  Parity parity) {
    const double n_int = bc == BoundaryCondition::dielectricTM ? cfg.n : 1.0;
    const int N = auto_element_count(g, n_int * std::abs(k_seed), cfg);
    const auto grid = make_boundary_grid(g, N);

    cd k = k_seed;
    SigmaResult sig;
    VectorXcd warm;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const auto sys = assemble_bem(grid, k, cfg.n, bc, parity);
        sig = smallest_singular(sys.A, warm.size() ? &warm : nullptr);
        warm = sig.v;
        const cd denom = sig.u.dot(sys.dA * sig.v);  // Eigen dot conjugates the left factor
        if (std::abs(denom) == 0.0)
            throw std::runtime_error("resonance_search: vanishing Newton denominator");
        const cd step = -sig.sigma / denom;
        k += step;
        if (std::abs(k - k_seed) > cfg.capture_radius)
            throw std::runtime_error("resonance_search: left the capture radius of the seed");
        if (std::abs(step) < cfg.root_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("resonance_search: Newton did not converge from seed");
    // final residual at the converged k
    const auto sys = assemble_bem(grid, k, cfg.n, bc, parity);
    sig = smallest_singular(sys.A, &warm);
    const double rel = sig.sigma / sys.A.norm();
    if (rel > cfg.residual_tol)
        throw std::runtime_error("resonance_search: sigma_min plateau (relative " +
                                 std::to_string(rel) + "): not a resonance");

    Resonance r;
    r.kR = k;
    r.label = label;
    r.parity = parity;
    r.kind = bc == BoundaryCondition::dirichlet ? SolveKind::closed : SolveKind::open;
    r.e = g.eccentricity();
    r.R = g.scale();
    r.n = n_int;
    r.residual = rel;
    r.s.resize(N);
    r.w.resize(N);
    r.psi.resize(N);
    r.dnu_psi.resize(N);
    const int N4 = N / 4;
    for (int j = 0; j < N; ++j) {
        r.s[j] = grid.s[j];
        r.w[j] = grid.speed[j] * grid.trapezoid_weight();
        const auto [q, sgn] = wsdetail::quarter_rep(N, j, parity);
        if (bc == BoundaryCondition::dirichlet) {
            r.psi[j] = cd(0.0, 0.0);
            r.dnu_psi[j] = sgn * sig.v(q);
        } else {
            r.psi[j] = sgn * sig.v(q);
            r.dnu_psi[j] = sgn * sig.v(N4 + q);
        }
    }
    // normalize: open modes by max |psi|, closed by max |dnu psi|
    double scale = 0.0;
    const auto& ref = bc == BoundaryCondition::dirichlet ? r.dnu_psi : r.psi;
    for (const auto& v : ref) scale = std::max(scale, std::abs(v));
    if (scale > 0.0)
        for (int j = 0; j < N; ++j) {
            r.psi[j] /= scale;
            r.dnu_psi[j] /= scale;
        }
    return r;
}

/// Quality factor: with E = Re kR and gamma = -2 Im kR, Q = E / (2 gamma).
inline double quality_factor(const Resonance& r) {
    if (r.kind != SolveKind::open)
        throw std::domain_error("quality_factor: closed modes have no decay width");
    const double E = r.kR.real();
    const double gamma = -2.0 * r.kR.imag();
    return E / (2.0 * gamma);
}

struct FieldMap {
    int nx = 0, ny = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    std::vector<cd> values;             // row-major, y outer
    std::vector<bool> near_boundary;    // accuracy-degraded samples
};

/// Evaluate the boundary-integral representation of an open mode on a grid.
inline FieldMap field_map(const Resonance& r, double x0, double x1, double y0, double y1,
                          int nx, int ny) {
    if (r.kind != SolveKind::open)
        throw std::domain_error("field_map: requires an open resonance");
    const EllipseGeometry g(r.e, r.R);
    const double a = g.semi_major(), b = g.semi_minor();
    const int N = static_cast<int>(r.s.size());
    std::vector<Vec2> pos(N), nrm(N);
    for (int j = 0; j < N; ++j) {
        const double t = g.t_of_s(r.s[j]);
        pos[j] = g.position(t);
        nrm[j] = g.outward_normal(t);
    }
    const double h_el = g.perimeter() / N;
    const cd k_ex = r.kR / r.R, k_in = r.n * k_ex;
    const cd I(0.0, 1.0);

    FieldMap fm;
    fm.nx = nx;
    fm.ny = ny;
    fm.x0 = x0;
    fm.x1 = x1;
    fm.y0 = y0;
    fm.y1 = y1;
    fm.values.resize(std::size_t(nx) * ny);
    fm.near_boundary.resize(std::size_t(nx) * ny, false);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 x(x0 + (x1 - x0) * (ix + 0.5) / nx, y0 + (y1 - y0) * (iy + 0.5) / ny);
            const bool inside =
                (x.x() * x.x()) / (a * a) + (x.y() * x.y()) / (b * b) < 1.0;
            const cd k = inside ? k_in : k_ex;
            cd val(0.0, 0.0);
            double dmin = std::numeric_limits<double>::max();
            for (int j = 0; j < N; ++j) {
                const Vec2 diff = x - pos[j];
                const double rad = diff.norm();
                dmin = std::min(dmin, rad);
                if (rad < 1e-12) continue;
                const cd z = k * rad;
                cd j0, j1, yy0, yy1;
                specfun::cyl01(z, j0, j1, yy0, yy1);
                const cd G = (I / 4.0) * (j0 + I * yy0);
                const cd dnuG = -(I * k / 4.0) * (j1 + I * yy1) * (nrm[j].dot(diff) / rad);
                // interior: psi = S phi - D psi ; exterior: psi = D psi - S phi
                const cd contrib = G * r.dnu_psi[j] - dnuG * r.psi[j];
                val += (inside ? contrib : -contrib) * r.w[j];
            }
            const std::size_t idx = std::size_t(iy) * nx + ix;
            fm.values[idx] = val;
            fm.near_boundary[idx] = dmin < h_el;
        }
    return fm;
}

}  // namespace ecav

#endif
