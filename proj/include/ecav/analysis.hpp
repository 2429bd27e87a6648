#ifndef ECAV_ANALYSIS_HPP
#define ECAV_ANALYSIS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ecav/husimi.hpp"
#include "ecav/raydyn.hpp"
#include "ecav/tracker.hpp"

namespace ecav {

/// Signed self-energy curve S_e(e) of one open mode against its closed
/// reference, labeled by the open mode.
struct SelfEnergySeries {
    ModeLabel label;
    std::vector<double> e_grid;
    std::vector<double> values;
};

/// Closed reference of an open mode (m, l). In the vanishing-leakage limit
/// n -> infinity the TM matching condition reduces to J_{m-1}(n kR) = 0, so
/// n kR_open(m, l) tends to the Dirichlet eigenvalue j_{|m-1|, l} (J_{-1} and
/// J_1 share their zeros). The closed partner is therefore (|m-1|, l).
inline ModeLabel closed_partner(const ModeLabel& open_label) {
    return {open_label.m >= 1 ? open_label.m - 1 : 1, open_label.ell};
}

/// S_e(e) = Re kR_closed(|m-1|, l)/n - Re kR_open(m, l): the open resonance
/// measured against the same-medium closed cavity, whose spectrum is the
/// billiard spectrum scaled by 1/n. Vanishes as n -> infinity.
inline SelfEnergySeries self_energy(const ModeTrajectory& closed, const ModeTrajectory& open) {
    if (closed.kind != SolveKind::closed || open.kind != SolveKind::open)
        throw std::domain_error("self_energy: expected one closed and one open trajectory");
    if (!(closed.label == closed_partner(open.label)))
        throw std::domain_error("self_energy: closed trajectory is not the partner mode");
    const std::size_t np = std::min(closed.solved_points(), open.solved_points());
    for (std::size_t i = 0; i < np; ++i)
        if (std::abs(closed.e_grid[i] - open.e_grid[i]) > 1e-12)
            throw std::domain_error("self_energy: eccentricity grids differ");
    SelfEnergySeries s;
    s.label = open.label;
    for (std::size_t i = 0; i < np; ++i) {
        s.e_grid.push_back(open.e_grid[i]);
        s.values.push_back(closed.kR_values[i].real() / open.resonances[i].n -
                           open.kR_values[i].real());
    }
    return s;
}

struct DeltaSeries {
    std::vector<double> e_grid;
    std::vector<double> delta;   // |S_e,a - S_e,b|
    std::vector<double> e_zero;  // interpolated sign changes of (a - b)
    bool degenerate = false;     // a == b pointwise
};

inline DeltaSeries delta_self_energy(const SelfEnergySeries& a, const SelfEnergySeries& b) {
    if (a.e_grid.size() != b.e_grid.size())
        throw std::domain_error("delta_self_energy: grids differ in size");
    for (std::size_t i = 0; i < a.e_grid.size(); ++i)
        if (std::abs(a.e_grid[i] - b.e_grid[i]) > 1e-12)
            throw std::domain_error("delta_self_energy: eccentricity grids differ");
    DeltaSeries out;
    out.e_grid = a.e_grid;
    out.degenerate = true;
    std::vector<double> d(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        d[i] = a.values[i] - b.values[i];
        out.delta.push_back(std::abs(d[i]));
        if (d[i] != 0.0) out.degenerate = false;
    }
    if (out.degenerate) return out;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i] == 0.0)
            out.e_zero.push_back(a.e_grid[i]);
        else if (d[i] * d[i + 1] < 0.0) {
            const double f = d[i] / (d[i] - d[i + 1]);
            out.e_zero.push_back(a.e_grid[i] + f * (a.e_grid[i + 1] - a.e_grid[i]));
        }
    }
    return out;
}

/// Bhattacharyya distance between two normalized maps on a common grid:
/// kappa_B = sum_cells sqrt(m_p m_q) over per-cell masses, D_B = -ln kappa_B.
inline double bhattacharyya(const HusimiMap& p, const HusimiMap& q) {
    if (p.Ns != q.Ns || p.Np != q.Np)
        throw std::domain_error("bhattacharyya: grid dimensions differ");
    if (!p.normalized || !q.normalized)
        throw std::domain_error("bhattacharyya: maps must be normalized");
    const bool pr = p.p_c > 0.0, qr = q.p_c > 0.0;
    if (pr != qr || (pr && std::abs(p.p_c - q.p_c) > 1e-12))
        throw std::domain_error("bhattacharyya: restriction mismatch");
    double kappa = 0.0;
    for (std::size_t i = 0; i < p.w.size(); ++i) kappa += std::sqrt(p.w[i] * q.w[i]);
    kappa *= p.cell_area();
    return std::max(0.0, -std::log(std::max(kappa, 1e-300)));
}

enum class ModeClass { WG, SB, UB };

struct Classification {
    ModeClass cls = ModeClass::WG;
    double mass_wg = 0.0, mass_sb = 0.0, mass_ub = 0.0;
};

/// Partition phase space by the focal invariant Lambda(s,p): Lambda > 0 is
/// whispering-gallery territory; Lambda < 0 is split at lambda = Lambda/c^2
/// = -tau between the stable island (deeper) and the separatrix neighborhood.
inline Classification classify_mode(const HusimiMap& h, const EllipseGeometry& g,
                                    double tau = 0.25) {
    if (g.eccentricity() <= 0.0)
        throw std::domain_error("classify_mode: undefined at e=0 (no separatrix)");
    if (!h.normalized || h.p_c > 0.0)
        throw std::invalid_argument("classify_mode: requires a normalized unrestricted map");
    const double c2 = g.focal_distance() * g.focal_distance();
    Classification out;
    const double area = h.cell_area();
    for (int is = 0; is < h.Ns; ++is)
        for (int ip = 0; ip < h.Np; ++ip) {
            const double mass = h.at(is, ip) * area;
            if (mass == 0.0) continue;
            const double lam = focal_invariant(g, {h.s_center(is), h.p_center(ip)}) / c2;
            if (lam > 0.0)
                out.mass_wg += mass;
            else if (lam <= -tau)
                out.mass_sb += mass;
            else if (lam < 0.0)
                out.mass_ub += mass;
        }
    out.cls = ModeClass::WG;
    double best = out.mass_wg;
    if (out.mass_sb > best) {
        best = out.mass_sb;
        out.cls = ModeClass::SB;
    }
    if (out.mass_ub > best) out.cls = ModeClass::UB;
    return out;
}

/// Paired self-energy / decay-channel comparison across the eccentricity grid.
struct PairComparison {
    ModeLabel label_j, label_k;
    std::vector<double> e_grid;
    std::vector<double> delta_se;
    std::vector<double> d_b;      // NaN where a decay channel is empty
    std::vector<double> q_j, q_k;
    std::vector<double> e_zero;
    double e_dbmin = std::numeric_limits<double>::quiet_NaN();
    double db_min = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;
};

inline PairComparison compare_pair(const ModeTrajectory& closed_j, const ModeTrajectory& open_j,
                                   const ModeTrajectory& closed_k, const ModeTrajectory& open_k,
                                   double p_c, int Ns = 256, int Np = 256) {
    const auto se_j = self_energy(closed_j, open_j);
    const auto se_k = self_energy(closed_k, open_k);
    const auto ds = delta_self_energy(se_j, se_k);

    PairComparison out;
    out.label_j = se_j.label;
    out.label_k = se_k.label;
    out.e_grid = ds.e_grid;
    out.delta_se = ds.delta;
    out.e_zero = ds.e_zero;
    out.degenerate = ds.degenerate;

    const std::size_t np = ds.e_grid.size();
    out.d_b.assign(np, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < np; ++i) {
        out.q_j.push_back(quality_factor(open_j.resonances[i]));
        out.q_k.push_back(quality_factor(open_k.resonances[i]));
        if (out.degenerate) {
            out.d_b[i] = 0.0;
            continue;
        }
        const auto g = make_ellipse(ds.e_grid[i], open_j.resonances[i].R);
        try {
            const auto hj = restrict_below_critical(
                husimi_incident(open_j.resonances[i], g, open_j.resonances[i].n, Ns, Np), p_c);
            const auto hk = restrict_below_critical(
                husimi_incident(open_k.resonances[i], g, open_k.resonances[i].n, Ns, Np), p_c);
            out.d_b[i] = bhattacharyya(hj, hk);
        } catch (const std::runtime_error&) {
            // empty decay channel: flagged point, excluded from the min search
        }
    }
    for (std::size_t i = 0; i < np; ++i)
        if (std::isfinite(out.d_b[i]) && (!std::isfinite(out.db_min) || out.d_b[i] < out.db_min)) {
            out.db_min = out.d_b[i];
            out.e_dbmin = out.e_grid[i];
        }
    return out;
}

}  // namespace ecav

#endif
