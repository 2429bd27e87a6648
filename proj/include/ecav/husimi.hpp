#ifndef ECAV_HUSIMI_HPP
#define ECAV_HUSIMI_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ecav/wavesolver.hpp"

namespace ecav {

/// Boundary Husimi distribution on (s, p) phase space, stored as density
/// weights on a uniform cell grid: s in [0,1), p in [-1,1].
struct HusimiMap {
    int Ns = 0, Np = 0;
    std::vector<double> w;  // density, s-major: w[is * Np + ip]
    bool normalized = false;
    double p_c = -1.0;  // restriction cutoff; < 0 means unrestricted

    double cell_area() const { return (1.0 / Ns) * (2.0 / Np); }
    double s_center(int is) const { return (is + 0.5) / Ns; }
    double p_center(int ip) const { return -1.0 + 2.0 * (ip + 0.5) / Np; }
    double& at(int is, int ip) { return w[std::size_t(is) * Np + ip]; }
    double at(int is, int ip) const { return w[std::size_t(is) * Np + ip]; }

    double total_mass() const {
        double m = 0.0;
        for (double v : w) m += v;
        return m * cell_area();
    }
};

/// Incident-wave Husimi distribution of a resonance, from its boundary data:
///   H(s,p) = C |F h0(s,p) + (i/F) h1(s,p)|^2,
/// h0/h1 the overlaps of psi and (d_nu psi)/(nk) with a periodized boundary
/// Gaussian exp(i nk p L (s'-s)) exp(-(L(s'-s))^2 / (2 sigma^2)),
/// sigma = sqrt(2L/(nk)), F = sqrt(nk max(cos chi, 1e-3)); unit total mass.
inline HusimiMap husimi_incident(const Resonance& r, const EllipseGeometry& g, double n,
                                 int Ns, int Np) {
    if (Np < 64) throw std::invalid_argument("husimi_incident: p-grid too coarse (N_p < 64)");
    const bool closed = r.kind == SolveKind::closed;
    if (closed)
        for (const cd& v : r.psi)
            if (std::abs(v) != 0.0)
                throw std::invalid_argument("husimi_incident: closed mode with nonzero psi");

    const double L = g.perimeter();
    const double k = r.kR.real() / r.R;
    const double nk = n * k;
    const double sigma = std::sqrt(2.0 * L / nk);
    const double alpha = nk * L;  // momentum-phase scale
    const int N = static_cast<int>(r.s.size());
    const cd I(0.0, 1.0);

    HusimiMap h;
    h.Ns = Ns;
    h.Np = Np;
    h.w.assign(std::size_t(Ns) * Np, 0.0);

    const double dp = 2.0 / Np;
    // enough winding images to cover the 7-sigma packet support
    const int imax = std::max(1, static_cast<int>(std::ceil(7.0 * sigma / L)));
    std::vector<cd> h0(Np), h1(Np);
    std::vector<double> gw((2 * imax + 1) * N);
    std::vector<double> gd((2 * imax + 1) * N);
    for (int is = 0; is < Ns; ++is) {
        const double s = h.s_center(is);
        std::fill(h0.begin(), h0.end(), cd(0, 0));
        std::fill(h1.begin(), h1.end(), cd(0, 0));
        // collect the Gaussian-weighted sources (3 winding images each)
        int nsrc = 0;
        std::vector<int> src;
        src.reserve(gw.size());
        for (int q = 0; q < N; ++q) {
            for (int img = -imax; img <= imax; ++img) {
                const double d = r.s[q] + img - s;
                const double u = L * d / sigma;
                if (std::abs(u) > 7.0) continue;
                gw[nsrc] = std::exp(-0.5 * u * u);
                gd[nsrc] = d;
                src.push_back(q);
                ++nsrc;
            }
        }
        for (int t = 0; t < nsrc; ++t) {
            const int q = src[t];
            const double wq = r.w[q] * gw[t];
            const cd a0 = wq * r.psi[q];
            const cd a1 = wq * r.dnu_psi[q] / nk;
            // phase conj(exp(i alpha p d)) stepped across the p row
            const double d = gd[t];
            cd ph = std::exp(cd(0.0, -alpha * h.p_center(0) * d));
            const cd step = std::exp(cd(0.0, -alpha * dp * d));
            for (int ip = 0; ip < Np; ++ip) {
                h0[ip] += a0 * ph;
                h1[ip] += a1 * ph;
                ph *= step;
            }
        }
        for (int ip = 0; ip < Np; ++ip) {
            const double p = h.p_center(ip);
            const double coschi = std::sqrt(std::max(1.0 - p * p, 0.0));
            const double F = std::sqrt(nk * std::max(coschi, 1e-3));
            const cd amp = closed ? (I / F) * h1[ip] : F * h0[ip] + (I / F) * h1[ip];
            h.at(is, ip) = std::norm(amp);
        }
    }
    const double mass = h.total_mass();
    if (mass <= 0.0) throw std::runtime_error("husimi_incident: vanishing distribution");
    for (double& v : h.w) v /= mass;
    h.normalized = true;
    return h;
}

/// Zero the non-leaky region |p| >= p_c and renormalize: the decay channel.
inline HusimiMap restrict_below_critical(const HusimiMap& h, double p_c) {
    if (!h.normalized)
        throw std::invalid_argument("restrict_below_critical: map must be normalized");
    if (!(p_c > 0.0 && p_c <= 1.0))
        throw std::domain_error("restrict_below_critical: p_c must be in (0,1]");
    HusimiMap out = h;
    for (int is = 0; is < h.Ns; ++is)
        for (int ip = 0; ip < h.Np; ++ip)
            if (std::abs(h.p_center(ip)) >= p_c) out.at(is, ip) = 0.0;
    const double mass = out.total_mass();
    if (mass <= 0.0)
        throw std::runtime_error("restrict_below_critical: empty decay channel below p_c");
    for (double& v : out.w) v /= mass;
    out.p_c = p_c;
    return out;
}

/// Argmax cell center; ties resolved toward smaller s, then smaller p.
inline std::pair<double, double> husimi_peak(const HusimiMap& h) {
    double best = 0.0;
    int bis = -1, bip = -1;
    for (int is = 0; is < h.Ns; ++is)
        for (int ip = 0; ip < h.Np; ++ip)
            if (h.at(is, ip) > best) {
                best = h.at(is, ip);
                bis = is;
                bip = ip;
            }
    if (bis < 0) throw std::domain_error("husimi_peak: all-zero map");
    return {h.s_center(bis), h.p_center(bip)};
}

}  // namespace ecav

#endif
