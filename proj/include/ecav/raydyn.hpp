#ifndef ECAV_RAYDYN_HPP
#define ECAV_RAYDYN_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecav/geometry.hpp"

namespace ecav {

/// Phase-space point on the boundary: normalized arclength and tangential
/// momentum p = sin(chi).
struct BirkhoffCoord {
    double s;  // in [0,1)
    double p;  // in [-1,1]
};

struct RayTrajectory {
    std::vector<BirkhoffCoord> points;  // points[0] is the seed
};

struct SeparatrixCurve {
    // sampled (s,p) pairs; branch 0/1 aim at focus +c/-c, branches 2/3 are
    // the momentum-reversed partners
    std::vector<std::vector<BirkhoffCoord>> branches;
};

namespace detail {

inline double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

/// Unit launch direction for (s,p): p along the tangent plus the inward
/// normal component.
inline Vec2 launch_direction(const EllipseGeometry& g, double t, double p) {
    const Vec2 tg = g.tangent(t);
    const Vec2 nin = -g.outward_normal(t);
    const double cchi = std::sqrt(std::max(0.0, 1.0 - p * p));
    return p * tg + cchi * nin;
}

}  // namespace detail

inline constexpr double kGrazingGuard = 1.0 - 1e-9;

inline BirkhoffCoord bounce_map(const EllipseGeometry& g, const BirkhoffCoord& x) {
    if (std::abs(x.p) >= kGrazingGuard)
        throw std::domain_error("bounce_map: grazing incidence |p| ~ 1");
    const double t0 = g.t_of_s(x.s);
    const Vec2 r0 = g.position(t0);
    const Vec2 d = detail::launch_direction(g, t0, x.p);
    const double a = g.semi_major(), b = g.semi_minor();
    // (r0 + tau d) on the ellipse: quadratic with root tau=0; take the other.
    const double A = d.x() * d.x() / (a * a) + d.y() * d.y() / (b * b);
    const double B = 2.0 * (r0.x() * d.x() / (a * a) + r0.y() * d.y() / (b * b));
    const double tau = -B / A;
    if (!(tau > 1e-12 * g.scale()))
        throw std::runtime_error("bounce_map: degenerate chord");
    const Vec2 r1 = r0 + tau * d;
    const double t1 = std::atan2(r1.y() / b, r1.x() / a);
    const double p1 = d.dot(g.tangent(t1));
    return {g.s_of_t(t1), std::clamp(p1, -1.0, 1.0)};
}

inline RayTrajectory trace(const EllipseGeometry& g, const BirkhoffCoord& x0, int bounces) {
    if (bounces < 1) throw std::domain_error("trace: bounce count must be >= 1");
    RayTrajectory traj;
    traj.points.reserve(bounces + 1);
    traj.points.push_back(x0);
    for (int i = 0; i < bounces; ++i) {
        try {
            traj.points.push_back(bounce_map(g, traj.points.back()));
        } catch (const std::exception& err) {
            throw std::runtime_error("trace: bounce " + std::to_string(i + 1) + ": " + err.what());
        }
    }
    return traj;
}

/// Product of the two focal angular momenta of the chord launched from x.
/// Positive for whispering-gallery chords (ellipse caustic), negative in the
/// bouncing-ball region (hyperbola caustic), zero on the separatrix.
inline double focal_invariant(const EllipseGeometry& g, const BirkhoffCoord& x) {
    const double t = g.t_of_s(x.s);
    const Vec2 r = g.position(t);
    const Vec2 d = detail::launch_direction(g, t, x.p);
    const double l1 = detail::cross2(r - g.focus(0), d);
    const double l2 = detail::cross2(r - g.focus(1), d);
    return l1 * l2;
}

/// sin(chi) of the chords from boundary point s through each focus, plus the
/// momentum-reversed partners. max_s |p| equals the eccentricity.
inline std::vector<double> separatrix_p(const EllipseGeometry& g, double s) {
    if (g.eccentricity() == 0.0)
        throw std::domain_error("separatrix_p: degenerate separatrix at e = 0");
    const double t = g.t_of_s(s);
    const Vec2 r = g.position(t);
    const Vec2 tg = g.tangent(t);
    std::vector<double> out;
    out.reserve(4);
    for (int f = 0; f < 2; ++f) {
        const Vec2 u = (g.focus(f) - r).normalized();
        out.push_back(u.dot(tg));
    }
    out.push_back(-out[0]);
    out.push_back(-out[1]);
    return out;
}

inline SeparatrixCurve sample_separatrix(const EllipseGeometry& g, int samples = 512) {
    SeparatrixCurve curve;
    curve.branches.assign(4, {});
    for (int i = 0; i < samples; ++i) {
        const double s = (i + 0.5) / samples;
        const auto ps = separatrix_p(g, s);
        for (int b = 0; b < 4; ++b) curve.branches[b].push_back({s, ps[b]});
    }
    return curve;
}

inline double critical_line(double n) {
    if (!(n > 1.0)) throw std::domain_error("critical_line: refractive index must exceed 1");
    return 1.0 / n;
}

struct PsosSample {
    std::vector<BirkhoffCoord> points;
    std::vector<std::pair<std::size_t, std::string>> failed_seeds;
};

inline PsosSample psos_sample(const EllipseGeometry& g, const std::vector<BirkhoffCoord>& seeds,
                              int bounces) {
    if (seeds.empty()) throw std::domain_error("psos_sample: no seeds");
    PsosSample out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (bounces == 0) {
            out.points.push_back(seeds[i]);
            continue;
        }
        try {
            auto traj = trace(g, seeds[i], bounces);
            out.points.insert(out.points.end(), traj.points.begin(), traj.points.end());
        } catch (const std::exception& err) {
            out.failed_seeds.emplace_back(i, err.what());
        }
    }
    return out;
}

}  // namespace ecav

#endif
