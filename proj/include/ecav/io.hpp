#ifndef ECAV_IO_HPP
#define ECAV_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecav/analysis.hpp"
#include "ecav/raydyn.hpp"

namespace ecav::io {

using nlohmann::json;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    return f;
}

inline const char* kind_name(SolveKind k) { return k == SolveKind::closed ? "closed" : "open"; }

inline std::string parity_name(const Parity& p) {
    return std::string(p.x == Sign::even ? "e" : "o") + (p.y == Sign::even ? "e" : "o");
}

inline void write_trajectories_csv(const std::string& path,
                                   const std::vector<ModeTrajectory>& trajs) {
    auto f = open_out(path);
    f << "e,m,l,kind,parity,re_kr,im_kr,residual\n";
    for (const auto& t : trajs) {
        const Parity par = parity_of(t.label);
        for (std::size_t i = 0; i < t.solved_points(); ++i)
            f << fmt(t.e_grid[i]) << ',' << t.label.m << ',' << t.label.ell << ','
              << kind_name(t.kind) << ',' << parity_name(par) << ','
              << fmt(t.kR_values[i].real()) << ',' << fmt(t.kR_values[i].imag()) << ','
              << fmt(t.resonances[i].residual) << '\n';
    }
}

inline void write_self_energy_csv(const std::string& path,
                                  const std::vector<SelfEnergySeries>& series) {
    auto f = open_out(path);
    f << "# s_e = Re kR_closed(|m-1|,l)/n - Re kR_open(m,l) (signed)\n";
    f << "e,m,l,s_e\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.e_grid.size(); ++i)
            f << fmt(s.e_grid[i]) << ',' << s.label.m << ',' << s.label.ell << ','
              << fmt(s.values[i]) << '\n';
}

inline json label_json(const ModeLabel& l) { return json{{"m", l.m}, {"l", l.ell}}; }

inline json crossing_report_json(const CrossingReport& r) {
    json ev = json::array();
    for (const auto& e : r.events)
        ev.push_back({{"e", e.e},
                      {"gap", e.gap},
                      {"class", e.kind == CrossingClass::crossing ? "crossing"
                                                                  : "avoided_crossing"}});
    return json{{"label_a", label_json(r.label_a)}, {"label_b", label_json(r.label_b)},
                {"e_min_gap", r.e_min_gap},         {"min_gap", r.min_gap},
                {"delta_cross", CrossingReport::delta_cross}, {"events", ev}};
}

inline void write_crossings_json(const std::string& path,
                                 const std::vector<CrossingReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(crossing_report_json(r));
    open_out(path) << arr.dump(2) << '\n';
}

inline json pair_comparison_json(const PairComparison& pc) {
    auto num_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json db = json::array(), qj = json::array(), qk = json::array();
    for (double v : pc.d_b) db.push_back(num_or_null(v));
    for (double v : pc.q_j) qj.push_back(num_or_null(v));
    for (double v : pc.q_k) qk.push_back(num_or_null(v));
    return json{{"labels", json::array({label_json(pc.label_j), label_json(pc.label_k)})},
                {"e_grid", pc.e_grid},
                {"delta_se", pc.delta_se},
                {"d_b", db},
                {"e_zero", pc.e_zero},
                {"e_dbmin", num_or_null(pc.e_dbmin)},
                {"db_min", num_or_null(pc.db_min)},
                {"q_j", qj},
                {"q_k", qk},
                {"degenerate", pc.degenerate}};
}

inline void write_psos_csv(const std::string& path, const std::vector<RayTrajectory>& trajs) {
    auto f = open_out(path);
    f << "trajectory,bounce,s,p\n";
    for (std::size_t t = 0; t < trajs.size(); ++t)
        for (std::size_t b = 0; b < trajs[t].points.size(); ++b)
            f << t << ',' << b << ',' << fmt(trajs[t].points[b].s) << ','
              << fmt(trajs[t].points[b].p) << '\n';
}

inline void write_husimi_csv(const std::string& path, const HusimiMap& h) {
    auto f = open_out(path);
    f << "s,p,weight\n";
    for (int is = 0; is < h.Ns; ++is)
        for (int ip = 0; ip < h.Np; ++ip)
            f << fmt(h.s_center(is)) << ',' << fmt(h.p_center(ip)) << ','
              << fmt(h.at(is, ip)) << '\n';
}

// minimal SVG plotting helpers (presentation only, no acceptance weight)

struct SvgCanvas {
    std::ostringstream body;
    double width = 640, height = 480;
    double x0 = 0, x1 = 1, y0 = -1, y1 = 1;  // data window

    double px(double x) const { return (x - x0) / (x1 - x0) * (width - 80) + 60; }
    double py(double y) const { return height - 40 - (y - y0) / (y1 - y0) * (height - 80); }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, double sw = 1.0) {
        body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << sw
             << "\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i)
            body << fmt(px(xs[i])) << ',' << fmt(py(ys[i])) << ' ';
        body << "\"/>\n";
    }
    void dot(double x, double y, const std::string& color, double r = 1.2) {
        body << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << r
             << "\" fill=\"" << color << "\"/>\n";
    }
    void hline(double y, const std::string& color) {
        polyline({x0, x1}, {y, y}, color, 1.0);
    }
    void text(double x, double y, const std::string& s) {
        body << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(py(y))
             << "\" font-size=\"12\">" << s << "</text>\n";
    }
    void write(const std::string& path) const {
        auto f = open_out(path);
        f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
          << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
          << body.str() << "</svg>\n";
    }
};

inline void write_psos_svg(const std::string& path, const EllipseGeometry& g,
                           const std::vector<RayTrajectory>& trajs, double n_index) {
    SvgCanvas c;
    c.x0 = 0;
    c.x1 = 1;
    c.y0 = -1;
    c.y1 = 1;
    for (const auto& t : trajs)
        for (const auto& pt : t.points) c.dot(pt.s, pt.p, "#444", 0.8);
    if (g.eccentricity() > 0.0) {
        const auto sep = sample_separatrix(g, 512);
        for (const auto& branch : sep.branches) {
            std::vector<double> xs, ys;
            for (const auto& pt : branch) {
                xs.push_back(pt.s);
                ys.push_back(pt.p);
            }
            c.polyline(xs, ys, "cyan", 1.2);
        }
    }
    if (n_index > 1.0) {
        c.hline(critical_line(n_index), "red");
        c.hline(-critical_line(n_index), "red");
    }
    c.write(path);
}

inline void write_husimi_svg(const std::string& path, const HusimiMap& h,
                             const EllipseGeometry& g, double n_index) {
    SvgCanvas c;
    double wmax = 0.0;
    for (double v : h.w) wmax = std::max(wmax, v);
    const double cw = (c.width - 80) / h.Ns, ch = (c.height - 80) / h.Np;
    for (int is = 0; is < h.Ns; ++is)
        for (int ip = 0; ip < h.Np; ++ip) {
            const int shade = 255 - static_cast<int>(255.0 * (wmax > 0 ? h.at(is, ip) / wmax : 0));
            if (shade >= 250) continue;
            c.body << "<rect x=\"" << fmt(c.px(h.s_center(is)) - cw / 2) << "\" y=\""
                   << fmt(c.py(h.p_center(ip)) - ch / 2) << "\" width=\"" << fmt(cw + 0.5)
                   << "\" height=\"" << fmt(ch + 0.5) << "\" fill=\"rgb(" << shade << ','
                   << shade << ',' << shade << ")\"/>\n";
        }
    if (g.eccentricity() > 0.0) {
        const auto sep = sample_separatrix(g, 512);
        for (const auto& branch : sep.branches) {
            std::vector<double> xs, ys;
            for (const auto& pt : branch) {
                xs.push_back(pt.s);
                ys.push_back(pt.p);
            }
            c.polyline(xs, ys, "cyan", 1.0);
        }
    }
    if (n_index > 1.0) {
        c.hline(critical_line(n_index), "red");
        c.hline(-critical_line(n_index), "red");
    }
    c.write(path);
}

inline void write_pair_svg(const std::string& path, const PairComparison& pc) {
    // three stacked panels: delta S_e, D_B, Q
    SvgCanvas c;
    c.width = 640;
    c.height = 720;
    auto panel = [&](const std::vector<double>& ys, double ytop, int row,
                     const std::string& color) {
        double lo = 1e300, hi = -1e300;
        for (double v : ys)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (!(hi > lo)) {
            lo = 0;
            hi = 1;
        }
        std::vector<double> xs, yy;
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (std::isfinite(ys[i])) {
                xs.push_back(pc.e_grid[i]);
                yy.push_back(ytop - 0.3 + 0.28 * (ys[i] - lo) / (hi - lo + 1e-300));
            }
        (void)row;
        c.polyline(xs, yy, color, 1.4);
    };
    c.x0 = pc.e_grid.empty() ? 0.0 : pc.e_grid.front();
    c.x1 = pc.e_grid.empty() ? 1.0 : pc.e_grid.back();
    c.y0 = 0.0;
    c.y1 = 1.0;
    panel(pc.delta_se, 1.0, 0, "black");
    panel(pc.d_b, 0.65, 1, "blue");
    panel(pc.q_j, 0.3, 2, "green");
    panel(pc.q_k, 0.3, 2, "orange");
    for (double ez : pc.e_zero) c.polyline({ez, ez}, {0.0, 1.0}, "#ccc", 0.8);
    c.text(c.x0, 0.98, "delta S_e");
    c.text(c.x0, 0.63, "D_B");
    c.text(c.x0, 0.28, "Q");
    c.write(path);
}

}  // namespace ecav::io

#endif
