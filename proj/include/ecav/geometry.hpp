#ifndef ECAV_GEOMETRY_HPP
#define ECAV_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ecav {

using Vec2 = Eigen::Vector2d;

/// Boundary sample: position, inward unit normal, normalized arclength and
/// signed curvature at angular parameter t.
struct BoundaryPoint {
    Vec2 position;
    Vec2 inward_normal;
    double s;          // normalized arclength in [0,1), measured from t=0
    double curvature;  // 1/length, positive for a convex boundary
};

/// Ellipse with area pinned to pi*R^2 for every eccentricity, so that kR
/// values stay comparable across the deformation family (a*b = R^2).
class EllipseGeometry {
public:
    EllipseGeometry(double e, double R) : e_(e), R_(R) {
        if (!(e >= 0.0 && e < 1.0))
            throw std::domain_error("EllipseGeometry: eccentricity must be in [0,1)");
        if (!(R > 0.0))
            throw std::domain_error("EllipseGeometry: reference length must be positive");
        const double q = std::pow(1.0 - e * e, 0.25);
        a_ = R / q;
        b_ = R * q;
        c_ = a_ * e;
        perimeter_ = 4.0 * a_ * std::comp_ellint_2(e);
    }

    double eccentricity() const { return e_; }
    double scale() const { return R_; }
    double semi_major() const { return a_; }
    double semi_minor() const { return b_; }
    double focal_distance() const { return c_; }
    double perimeter() const { return perimeter_; }

    Vec2 position(double t) const { return {a_ * std::cos(t), b_ * std::sin(t)}; }

    /// |dx/dt|
    double speed(double t) const {
        const double st = std::sin(t), ct = std::cos(t);
        return std::sqrt(a_ * a_ * st * st + b_ * b_ * ct * ct);
    }

    Vec2 tangent(double t) const {
        const double v = speed(t);
        return {-a_ * std::sin(t) / v, b_ * std::cos(t) / v};
    }

    Vec2 outward_normal(double t) const {
        const double v = speed(t);
        return {b_ * std::cos(t) / v, a_ * std::sin(t) / v};
    }

    double curvature(double t) const {
        const double v = speed(t);
        return a_ * b_ / (v * v * v);
    }

    /// Arclength from t=0 to t (t in radians, any value; monotone in t).
    double arclength(double t) const {
        const double whole = std::floor(t / (2.0 * M_PI));
        double tr = t - whole * 2.0 * M_PI;  // [0, 2pi)
        double acc = whole * perimeter_;
        // quarter-symmetry range reduction
        const double quarter = perimeter_ / 4.0;
        int q = static_cast<int>(std::floor(tr / (M_PI / 2.0)));
        if (q > 3) q = 3;
        const double tq = tr - q * M_PI / 2.0;
        // arc from t=0 to u for u in [0, pi/2]; the speed mirrors about pi/2
        auto arc_q = [this](double u) {
            return a_ * (std::comp_ellint_2(e_) - std::ellint_2(e_, M_PI / 2.0 - u));
        };
        if (q % 2 == 0)
            acc += q * quarter + arc_q(tq);
        else
            acc += (q + 1) * quarter - arc_q(M_PI / 2.0 - tq);
        return acc;
    }

    /// Normalized arclength s in [0,1) for t in [0,2pi).
    double s_of_t(double t) const {
        double s = arclength(t) / perimeter_;
        s -= std::floor(s);
        if (1.0 - s < 1e-14) s = 0.0;  // roundoff below t = 0 wraps to ~1
        return s;
    }

    /// Inverse of s_of_t by Newton iteration (monotone map).
    double t_of_s(double s) const {
        s -= std::floor(s);
        const double target = s * perimeter_;
        double t = 2.0 * M_PI * s;  // exact for the circle
        for (int it = 0; it < 60; ++it) {
            const double f = arclength(t) - target;
            const double d = speed(t);
            const double step = f / d;
            t -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return t - 2.0 * M_PI * std::floor(t / (2.0 * M_PI));
    }

    BoundaryPoint boundary_point(double t) const {
        t -= 2.0 * M_PI * std::floor(t / (2.0 * M_PI));
        return {position(t), -outward_normal(t), s_of_t(t), curvature(t)};
    }

    Vec2 focus(int which) const {
        return {which == 0 ? c_ : -c_, 0.0};
    }

private:
    double e_, R_, a_, b_, c_, perimeter_;
};

inline EllipseGeometry make_ellipse(double e, double R) { return EllipseGeometry(e, R); }

}  // namespace ecav

#endif
