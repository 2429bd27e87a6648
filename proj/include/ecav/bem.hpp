#ifndef ECAV_BEM_HPP
#define ECAV_BEM_HPP

#include <Eigen/Dense>
#include <Eigen/LU>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ecav/geometry.hpp"
#include "ecav/specfun.hpp"

namespace ecav {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

enum class Sign { even, odd };

/// Reflection parity of a mode under x -> -x and y -> -y.
struct Parity {
    Sign x = Sign::even;
    Sign y = Sign::even;
};

inline int sign_of(Sign s) { return s == Sign::even ? 1 : -1; }

enum class BoundaryCondition { dirichlet, dielectricTM };

/// Discretization of the boundary on the shifted periodic grid
/// t_j = 2*pi*(j+1/2)/N, N divisible by 4 so the reflection images of every
/// node are again nodes and no node sits on a symmetry axis.
struct BoundaryGrid {
    const EllipseGeometry* geom = nullptr;
    int N = 0;
    std::vector<double> t, speed, s, kappa;
    std::vector<Vec2> pos, nrm;         // nrm is the outward unit normal
    std::vector<double> kress;          // log-quadrature weights R[d]
    std::vector<double> logdiff;        // ln(4 sin^2((t_i-t_j)/2)) by |i-j|
    std::vector<double> nddot;          // nu . x'' at each node

    double trapezoid_weight() const { return 2.0 * M_PI / N; }
};

inline BoundaryGrid make_boundary_grid(const EllipseGeometry& g, int N) {
    if (N < 8 || N % 4 != 0)
        throw std::invalid_argument("make_boundary_grid: N must be a multiple of 4, N >= 8");
    BoundaryGrid grid;
    grid.geom = &g;
    grid.N = N;
    grid.t.resize(N);
    grid.speed.resize(N);
    grid.s.resize(N);
    grid.kappa.resize(N);
    grid.pos.resize(N);
    grid.nrm.resize(N);
    grid.nddot.resize(N);
    const double a = g.semi_major(), b = g.semi_minor();
    for (int j = 0; j < N; ++j) {
        const double t = 2.0 * M_PI * (j + 0.5) / N;
        grid.t[j] = t;
        grid.speed[j] = g.speed(t);
        grid.s[j] = g.s_of_t(t);
        grid.kappa[j] = g.curvature(t);
        grid.pos[j] = g.position(t);
        grid.nrm[j] = g.outward_normal(t);
        // x'' = (-a cos t, -b sin t);  nu.x'' = -a b / |x'|
        grid.nddot[j] = -a * b / grid.speed[j];
    }
    const int n = N / 2;
    grid.kress.resize(N);
    grid.logdiff.resize(N);
    for (int d = 0; d < N; ++d) {
        const double th = 2.0 * M_PI * d / N;
        double sum = 0.0;
        for (int m = 1; m < n; ++m) sum += std::cos(m * th) / m;
        grid.kress[d] = -(2.0 * M_PI / n) * sum - (M_PI / (n * n)) * std::cos(n * th);
        grid.logdiff[d] =
            d == 0 ? 0.0 : std::log(4.0 * std::sin(th / 2.0) * std::sin(th / 2.0));
    }
    return grid;
}

namespace bemdetail {

struct KernelEntry {
    cd S, D, dS, dD;  // operator entries and their d/dk derivatives
};

/// Single- and double-layer Nystrom entries between collocation node i and
/// source node j, for wavenumber k, with the Kress log-singularity split.
inline KernelEntry kernel_entry(const BoundaryGrid& g, int i, int j, cd k) {
    KernelEntry out;
    const double w = g.trapezoid_weight();
    const cd I(0.0, 1.0);
    if (i == j) {
        const double sp = g.speed[i];
        const double R0 = g.kress[0];
        // S: M1 = -(1/4pi) J0(0) |x'|,  M2 diagonal from the log split
        const cd M1 = cd(-sp / (4.0 * M_PI), 0.0);
        const cd M2 = (I / 4.0 -
                       (std::log(k * sp / 2.0) + specfun::kEulerGamma) / (2.0 * M_PI)) *
                      sp;
        out.S = R0 * M1 + w * M2;
        out.dS = w * (-sp / (2.0 * M_PI * k));
        // D: K1 vanishes on the diagonal; K2 limit is curvature-driven
        out.D = w * cd(g.nddot[i] / (4.0 * M_PI * sp), 0.0);
        out.dD = cd(0.0, 0.0);
        return out;
    }
    const int d = ((i - j) % g.N + g.N) % g.N;
    const Vec2 diff = g.pos[i] - g.pos[j];
    const double r = diff.norm();
    const cd z = k * r;
    cd j0, j1, y0, y1;
    specfun::cyl01(z, j0, j1, y0, y1);
    const cd h0 = j0 + I * y0, h1 = j1 + I * y1;
    const double sp = g.speed[j];
    const double ln4s = g.logdiff[d];
    const double R = g.kress[d];

    // single layer
    const cd M = (I / 4.0) * h0 * sp;
    const cd M1 = -(1.0 / (4.0 * M_PI)) * j0 * sp;
    out.S = R * M1 + w * (M - M1 * ln4s);
    const cd dM = -(I / 4.0) * r * h1 * sp;
    const cd dM1 = (1.0 / (4.0 * M_PI)) * r * j1 * sp;
    out.dS = R * dM1 + w * (dM - dM1 * ln4s);

    // double layer (normal derivative at the source point)
    const double wgt = (g.nrm[j].dot(diff) / r) * sp;
    const cd K = (I * k / 4.0) * h1 * wgt;
    const cd K1 = -(k / (4.0 * M_PI)) * j1 * wgt;
    out.D = R * K1 + w * (K - K1 * ln4s);
    const cd dK = (I / 4.0) * wgt * r * k * h0;
    const cd dK1 = -(1.0 / (4.0 * M_PI)) * wgt * r * k * j0;
    out.dD = R * dK1 + w * (dK - dK1 * ln4s);
    return out;
}

struct ImageSet {
    int idx[4];
    double sgn[4];
};

/// Reflection images of quarter node q on the full grid with the density
/// signs of the given parity class.
inline ImageSet images_of(int N, int q, Parity parity) {
    ImageSet im;
    const double sx = sign_of(parity.x), sy = sign_of(parity.y);
    im.idx[0] = q;
    im.sgn[0] = 1.0;
    im.idx[1] = N - 1 - q;          // t -> -t
    im.sgn[1] = sy;
    im.idx[2] = N / 2 - 1 - q;      // t -> pi - t
    im.sgn[2] = sx;
    im.idx[3] = N / 2 + q;          // t -> pi + t
    im.sgn[3] = sx * sy;
    return im;
}

}  // namespace bemdetail

/// Full-boundary single- and double-layer matrices (used by the operator
/// oracle tests and by field evaluation).
inline void assemble_layer_operators(const BoundaryGrid& g, cd k, MatrixXcd& S, MatrixXcd& D) {
    const int N = g.N;
    S.resize(N, N);
    D.resize(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const auto e = bemdetail::kernel_entry(g, i, j, k);
            S(i, j) = e.S;
            D(i, j) = e.D;
        }
}

struct FoldedBlocks {
    MatrixXcd S, D, dS, dD;  // N/4 x N/4 parity-reduced operators
};

inline FoldedBlocks assemble_folded(const BoundaryGrid& g, cd k, Parity parity) {
    const int N4 = g.N / 4;
    FoldedBlocks B;
    B.S = MatrixXcd::Zero(N4, N4);
    B.D = MatrixXcd::Zero(N4, N4);
    B.dS = MatrixXcd::Zero(N4, N4);
    B.dD = MatrixXcd::Zero(N4, N4);
    for (int q = 0; q < N4; ++q) {
        const auto im = bemdetail::images_of(g.N, q, parity);
        for (int i = 0; i < N4; ++i) {
            for (int c = 0; c < 4; ++c) {
                const auto e = bemdetail::kernel_entry(g, i, im.idx[c], k);
                B.S(i, q) += im.sgn[c] * e.S;
                B.D(i, q) += im.sgn[c] * e.D;
                B.dS(i, q) += im.sgn[c] * e.dS;
                B.dD(i, q) += im.sgn[c] * e.dD;
            }
        }
    }
    return B;
}

struct BemSystem {
    MatrixXcd A, dA;  // system matrix and its d/d(kR) derivative
};

/// Parity-reduced boundary-integral system whose null vectors are the
/// resonances (open) or eigenmodes (closed).
///  dirichlet:    S_k phi = 0                         (unknown phi)
///  dielectricTM: [ I/2 + D_in   -S_in ] [psi]   = 0  (interior k_in = n k)
///                [ I/2 - D_ex    S_ex ] [phi]        (exterior k)
inline BemSystem assemble_bem(const BoundaryGrid& g, cd kR, double n, BoundaryCondition bc,
                              Parity parity) {
    const double R = g.geom->scale();
    const cd k = kR / R;
    const int N4 = g.N / 4;
    BemSystem sys;
    if (bc == BoundaryCondition::dirichlet) {
        auto B = assemble_folded(g, k, parity);
        sys.A = std::move(B.S);
        sys.dA = B.dS / R;  // chain rule d/d(kR)
        return sys;
    }
    auto Bi = assemble_folded(g, n * k, parity);
    auto Be = assemble_folded(g, k, parity);
    sys.A.resize(2 * N4, 2 * N4);
    sys.dA.resize(2 * N4, 2 * N4);
    const MatrixXcd half = 0.5 * MatrixXcd::Identity(N4, N4);
    sys.A.topLeftCorner(N4, N4) = half + Bi.D;
    sys.A.topRightCorner(N4, N4) = -Bi.S;
    sys.A.bottomLeftCorner(N4, N4) = half - Be.D;
    sys.A.bottomRightCorner(N4, N4) = Be.S;
    sys.dA.topLeftCorner(N4, N4) = (n / R) * Bi.dD;
    sys.dA.topRightCorner(N4, N4) = -(n / R) * Bi.dS;
    sys.dA.bottomLeftCorner(N4, N4) = -(1.0 / R) * Be.dD;
    sys.dA.bottomRightCorner(N4, N4) = (1.0 / R) * Be.dS;
    return sys;
}

struct SigmaResult {
    double sigma = 0.0;
    VectorXcd u, v;  // left/right singular pair of the smallest singular value
};

/// Smallest singular value and vectors by LU-based inverse iteration on
/// A^H A; a warm-start vector accelerates Newton sweeps.
inline SigmaResult smallest_singular(const MatrixXcd& A, const VectorXcd* warm = nullptr) {
    const int n = static_cast<int>(A.rows());
    Eigen::PartialPivLU<MatrixXcd> lu(A);
    VectorXcd v;
    if (warm && warm->size() == n)
        v = *warm;
    else {
        v = VectorXcd::Ones(n);
        for (int i = 0; i < n; ++i) v(i) += cd(0.3 * std::cos(1.7 * i), 0.2 * std::sin(2.3 * i));
    }
    v.normalize();
    double sigma_prev = -1.0;
    for (int it = 0; it < 50; ++it) {
        VectorXcd y = lu.adjoint().solve(v);
        VectorXcd x = lu.solve(y);
        const double nx = x.norm();
        if (!std::isfinite(nx) || nx == 0.0) break;  // numerically singular: keep last v
        v = x / nx;
        const double sigma = (A * v).norm();
        if (sigma_prev >= 0.0 && std::abs(sigma - sigma_prev) < 1e-12 * sigma) {
            sigma_prev = sigma;
            break;
        }
        sigma_prev = sigma;
    }
    SigmaResult out;
    out.v = v;
    VectorXcd Av = A * v;
    out.sigma = Av.norm();
    out.u = out.sigma > 0.0 ? VectorXcd(Av / out.sigma) : v;
    return out;
}

}  // namespace ecav

#endif
