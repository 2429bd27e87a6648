#ifndef ECAV_TRACKER_HPP
#define ECAV_TRACKER_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecav/wavesolver.hpp"

namespace ecav {

/// Continuation of one labeled mode along an ascending eccentricity grid.
struct ModeTrajectory {
    ModeLabel label;
    SolveKind kind = SolveKind::closed;
    std::vector<double> e_grid;
    std::vector<cd> kR_values;
    std::vector<Resonance> resonances;
    int truncated_at = -1;    // grid index of the first unsolved point, -1 if complete
    std::string diagnostic;   // reason for truncation

    bool complete() const { return truncated_at < 0; }
    std::size_t solved_points() const {
        return truncated_at < 0 ? e_grid.size() : static_cast<std::size_t>(truncated_at);
    }
};

enum class CrossingClass { crossing, avoided_crossing };

struct CrossingEvent {
    double e = 0.0;    // location (interpolated for sign changes)
    double gap = 0.0;  // Re kR gap at the event
    CrossingClass kind = CrossingClass::crossing;
};

struct CrossingReport {
    ModeLabel label_a, label_b;
    std::vector<CrossingEvent> events;
    double e_min_gap = 0.0;
    double min_gap = 0.0;
    static constexpr double delta_cross = 1e-3;
};

/// Solve one labeled mode on every grid point, seeding each solve from the
/// previous point (linear extrapolation once two points are available).
inline ModeTrajectory track_mode(const std::vector<double>& e_grid, const ModeLabel& label,
                                 SolveKind kind, const CavityConfig& cfg, double R = 1.0) {
    if (e_grid.size() < 1 || std::abs(e_grid.front()) > 1e-12)
        throw std::invalid_argument("track_mode: grid must start at e=0");
    for (std::size_t i = 1; i < e_grid.size(); ++i) {
        const double de = e_grid[i] - e_grid[i - 1];
        if (de <= 0.0 || de > 0.02 + 1e-12)
            throw std::invalid_argument("track_mode: grid must ascend with step <= 0.02");
    }
    const BoundaryCondition bc =
        kind == SolveKind::closed ? BoundaryCondition::dirichlet : BoundaryCondition::dielectricTM;
    const Parity parity = parity_of(label);

    ModeTrajectory traj;
    traj.label = label;
    traj.kind = kind;
    traj.e_grid = e_grid;

    cd seed = kind == SolveKind::closed ? cd(circle_billiard_k(label), 0.0)
                                        : circle_cavity_k(label, cfg.n) * R;
    for (std::size_t i = 0; i < e_grid.size(); ++i) {
        if (i >= 2) {
            // linear extrapolation in e
            const double r = (e_grid[i] - e_grid[i - 1]) / (e_grid[i - 1] - e_grid[i - 2]);
            seed = traj.kR_values[i - 1] + r * (traj.kR_values[i - 1] - traj.kR_values[i - 2]);
        } else if (i == 1) {
            seed = traj.kR_values[0];
        }
        auto solve_at = [&](double e, cd s, const cd* prev) {
            const auto g = make_ellipse(e, R);
            Resonance r = resonance_search(g, cfg, bc, s, label, parity);
            if (prev && std::abs(r.kR - *prev) > cfg.capture_radius)
                throw std::runtime_error("continuation jump beyond the step guard");
            return r;
        };
        try {
            const cd* prev = i > 0 ? &traj.kR_values[i - 1] : nullptr;
            Resonance r;
            try {
                r = solve_at(e_grid[i], seed, prev);
            } catch (const std::exception&) {
                if (i == 0) throw;
                // refine the continuation step: walk through intermediate
                // eccentricities so fast-moving branches stay in capture range
                bool ok = false;
                for (int nsub : {4, 16}) {
                    try {
                        cd k1 = traj.kR_values[i - 1];
                        cd k0 = i >= 2 ? traj.kR_values[i - 2] : k1;
                        const double de = (e_grid[i] - e_grid[i - 1]) / nsub;
                        const double de0 =
                            i >= 2 ? e_grid[i - 1] - e_grid[i - 2] : e_grid[i] - e_grid[i - 1];
                        double slope_h = de0;
                        for (int j = 1; j <= nsub; ++j) {
                            const cd s = k1 + (de / slope_h) * (k1 - k0);
                            Resonance rs =
                                solve_at(e_grid[i - 1] + j * de, s, &k1);
                            k0 = k1;
                            k1 = rs.kR;
                            slope_h = de;
                            if (j == nsub) r = std::move(rs);
                        }
                        ok = true;
                        break;
                    } catch (const std::exception&) {
                    }
                }
                if (!ok) throw;
            }
            traj.kR_values.push_back(r.kR);
            traj.resonances.push_back(std::move(r));
        } catch (const std::exception& ex) {
            traj.truncated_at = static_cast<int>(i);
            traj.diagnostic = "at e=" + std::to_string(e_grid[i]) + ": " + ex.what();
            break;
        }
    }
    return traj;
}

/// Scan the Re kR gap of two trajectories for crossings (sign change of the
/// signed difference, located by linear interpolation) and avoided crossings
/// (local gap minima above delta_cross).
inline CrossingReport detect_crossings(const ModeTrajectory& t1, const ModeTrajectory& t2) {
    if (t1.kind != t2.kind)
        throw std::domain_error("detect_crossings: trajectories of different kind");
    if (t1.label == t2.label)
        throw std::invalid_argument("detect_crossings: degenerate input (same label)");
    const std::size_t np = std::min(t1.solved_points(), t2.solved_points());
    if (np < 3) throw std::domain_error("detect_crossings: not enough common points");
    for (std::size_t i = 0; i < np; ++i)
        if (std::abs(t1.e_grid[i] - t2.e_grid[i]) > 1e-12)
            throw std::domain_error("detect_crossings: eccentricity grids differ");

    std::vector<double> d(np);
    for (std::size_t i = 0; i < np; ++i)
        d[i] = t1.kR_values[i].real() - t2.kR_values[i].real();

    CrossingReport rep;
    rep.label_a = t1.label;
    rep.label_b = t2.label;
    rep.min_gap = std::abs(d[0]);
    rep.e_min_gap = t1.e_grid[0];
    for (std::size_t i = 1; i < np; ++i)
        if (std::abs(d[i]) < rep.min_gap) {
            rep.min_gap = std::abs(d[i]);
            rep.e_min_gap = t1.e_grid[i];
        }

    for (std::size_t i = 0; i + 1 < np; ++i) {
        if (d[i] == 0.0) {
            rep.events.push_back({t1.e_grid[i], 0.0, CrossingClass::crossing});
        } else if (d[i] * d[i + 1] < 0.0) {
            const double f = d[i] / (d[i] - d[i + 1]);
            const double e_c = t1.e_grid[i] + f * (t1.e_grid[i + 1] - t1.e_grid[i]);
            rep.events.push_back({e_c, 0.0, CrossingClass::crossing});
        }
    }
    for (std::size_t i = 1; i + 1 < np; ++i) {
        const double gi = std::abs(d[i]);
        if (gi < std::abs(d[i - 1]) && gi < std::abs(d[i + 1]) && d[i] != 0.0 &&
            d[i - 1] * d[i] > 0.0 && d[i] * d[i + 1] > 0.0) {
            // interior gap minimum without sign change; a genuine avoided
            // crossing must close most of its flanking gap (prominence above
            // the residual gap), benign dips on well-separated curves do not
            const std::size_t w = std::min<std::size_t>({3, i, np - 1 - i});
            const double prom = std::min(std::abs(d[i - w]), std::abs(d[i + w])) - gi;
            if (prom <= gi) continue;
            const CrossingClass c = gi < CrossingReport::delta_cross
                                        ? CrossingClass::crossing
                                        : CrossingClass::avoided_crossing;
            rep.events.push_back({t1.e_grid[i], gi, c});
        }
    }
    return rep;
}

}  // namespace ecav

#endif
