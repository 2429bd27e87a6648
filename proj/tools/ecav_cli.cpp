#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ecav/analysis.hpp"
#include "ecav/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ecav;

namespace {

struct RunConfig {
    double n = 3.3;
    double e_end = 0.6;
    int e_steps = 61;
    std::vector<ModeLabel> labels;
    std::vector<std::pair<ModeLabel, ModeLabel>> pairs;
    int bem_elements = 0;
    int husimi_ns = 256;
    int husimi_np = 256;
    double p_c = -1.0;  // default 1/n
    double tau = 0.25;
    std::string out_dir = ".";
    int threads = 1;

    double critical() const { return p_c > 0.0 ? p_c : 1.0 / n; }
    std::vector<double> e_grid() const {
        std::vector<double> g(e_steps);
        for (int i = 0; i < e_steps; ++i) g[i] = e_end * i / (e_steps - 1);
        return g;
    }
    CavityConfig cavity() const {
        CavityConfig c;
        c.n = n;
        c.boundary_elements = bem_elements;
        return c;
    }
};

ModeLabel parse_label(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("label must be [m, l]");
    return {j[0].get<int>(), j[1].get<int>()};
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config: " + path);
    json j = json::parse(f);
    RunConfig c;
    c.n = j.value("n", 3.3);
    c.e_end = j.value("e_end", 0.6);
    c.e_steps = j.value("e_steps", 61);
    c.bem_elements = j.value("bem_elements", 0);
    c.husimi_ns = j.value("husimi_ns", 256);
    c.husimi_np = j.value("husimi_np", 256);
    c.p_c = j.value("p_c", -1.0);
    c.tau = j.value("tau", 0.25);
    c.out_dir = j.value("out_dir", ".");
    c.threads = j.value("threads", 1);
    for (const auto& l : j.value("labels", json::array())) c.labels.push_back(parse_label(l));
    for (const auto& p : j.value("pairs", json::array())) {
        if (!p.is_array() || p.size() != 2) throw std::runtime_error("pair must be [label,label]");
        c.pairs.emplace_back(parse_label(p[0]), parse_label(p[1]));
    }
    if (c.e_end > 0.99) throw std::runtime_error("config: e_end must be <= 0.99");
    if (c.e_steps < 2) throw std::runtime_error("config: e_steps must be >= 2");
    if (c.labels.empty()) throw std::runtime_error("config: labels must be nonempty");
    return c;
}

std::string label_tag(const ModeLabel& l) {
    return "m" + std::to_string(l.m) + "_l" + std::to_string(l.ell);
}

int cmd_psos(double ecc, double n, int nseeds, int bounces, const std::string& out) {
    fs::create_directories(out);
    const auto g = make_ellipse(ecc, 1.0);
    std::vector<RayTrajectory> trajs;
    for (int i = 0; i < nseeds; ++i) {
        const double p = 0.98 * (2.0 * (i + 0.5) / nseeds - 1.0);
        BirkhoffCoord seed{0.13, p};
        if (bounces == 0)
            trajs.push_back(RayTrajectory{{seed}});
        else
            trajs.push_back(trace(g, seed, bounces));
    }
    io::write_psos_csv(out + "/psos.csv", trajs);
    io::write_psos_svg(out + "/psos.svg", g, trajs, n);
    return 0;
}

struct Tracked {
    // closed holds the configured labels plus any closed partners not already
    // configured; open is index-aligned with cfg.labels
    std::vector<ModeLabel> closed_labels;
    std::vector<ModeTrajectory> closed, open;
    bool truncated = false;

    std::size_t closed_index(const ModeLabel& l) const {
        for (std::size_t i = 0; i < closed_labels.size(); ++i)
            if (closed_labels[i] == l) return i;
        throw std::logic_error("closed label lookup");
    }
};

Tracked track_all(const RunConfig& cfg) {
    const auto grid = cfg.e_grid();
    const auto cav = cfg.cavity();
    Tracked tr;
    tr.closed_labels = cfg.labels;
    for (const auto& label : cfg.labels) {
        const auto partner = closed_partner(label);
        bool known = false;
        for (const auto& k : tr.closed_labels) known = known || k == partner;
        if (!known) tr.closed_labels.push_back(partner);
    }
    auto report = [&](const ModeTrajectory& t) {
        if (!t.complete()) {
            tr.truncated = true;
            std::cerr << "truncated " << io::kind_name(t.kind) << " (m=" << t.label.m
                      << ", l=" << t.label.ell << ") " << t.diagnostic << "\n";
        }
    };
    for (const auto& label : tr.closed_labels) {
        tr.closed.push_back(track_mode(grid, label, SolveKind::closed, cav));
        report(tr.closed.back());
    }
    for (const auto& label : cfg.labels) {
        tr.open.push_back(track_mode(grid, label, SolveKind::open, cav));
        report(tr.open.back());
    }
    return tr;
}

int cmd_sweep(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const auto tr = track_all(cfg);

    std::vector<ModeTrajectory> all = tr.closed;
    all.insert(all.end(), tr.open.begin(), tr.open.end());
    io::write_trajectories_csv(cfg.out_dir + "/trajectories.csv", all);

    std::vector<SelfEnergySeries> series;
    for (std::size_t i = 0; i < cfg.labels.size(); ++i) {
        const auto& ref = tr.closed[tr.closed_index(closed_partner(cfg.labels[i]))];
        if (ref.solved_points() > 0 && tr.open[i].solved_points() > 0)
            series.push_back(self_energy(ref, tr.open[i]));
    }
    io::write_self_energy_csv(cfg.out_dir + "/self_energy.csv", series);

    std::vector<CrossingReport> reports;
    auto same_parity = [](const ModeLabel& a, const ModeLabel& b) {
        const Parity pa = parity_of(a), pb = parity_of(b);
        return pa.x == pb.x && pa.y == pb.y;
    };
    for (const auto* fam : {&tr.closed, &tr.open})
        for (std::size_t i = 0; i < fam->size(); ++i)
            for (std::size_t j = i + 1; j < fam->size(); ++j)
                if (same_parity((*fam)[i].label, (*fam)[j].label) &&
                    std::min((*fam)[i].solved_points(), (*fam)[j].solved_points()) >= 3)
                    reports.push_back(detect_crossings((*fam)[i], (*fam)[j]));
    io::write_crossings_json(cfg.out_dir + "/crossings.json", reports);
    return tr.truncated ? 1 : 0;
}

int cmd_modes(const RunConfig& cfg, double ecc) {
    fs::create_directories(cfg.out_dir);
    const auto cav = cfg.cavity();
    std::vector<double> grid;
    const int steps = std::max(2, static_cast<int>(std::ceil(ecc / 0.02)) + 1);
    if (ecc > 0.0)
        for (int i = 0; i < steps; ++i) grid.push_back(ecc * i / (steps - 1));
    else
        grid.push_back(0.0);

    auto f = io::open_out(cfg.out_dir + "/modes.csv");
    f << "e,m,l,kind,parity,re_kr,im_kr,residual,q\n";
    bool failed = false;
    for (const auto& label : cfg.labels)
        for (SolveKind kind : {SolveKind::closed, SolveKind::open}) {
            try {
                auto t = track_mode(grid, label, kind, cav);
                if (!t.complete()) throw std::runtime_error(t.diagnostic);
                const auto& r = t.resonances.back();
                f << io::fmt(ecc) << ',' << label.m << ',' << label.ell << ','
                  << io::kind_name(kind) << ',' << io::parity_name(parity_of(label)) << ','
                  << io::fmt(r.kR.real()) << ',' << io::fmt(r.kR.imag()) << ','
                  << io::fmt(r.residual) << ','
                  << (kind == SolveKind::open ? io::fmt(quality_factor(r)) : "inf") << '\n';
            } catch (const std::exception& ex) {
                failed = true;
                std::cerr << "solve failed (m=" << label.m << ", l=" << label.ell << ", "
                          << io::kind_name(kind) << "): " << ex.what() << "\n";
            }
        }
    return failed ? 1 : 0;
}

int cmd_husimi(const RunConfig& cfg, const ModeLabel& label, double ecc) {
    fs::create_directories(cfg.out_dir);
    const auto cav = cfg.cavity();
    std::vector<double> grid;
    const int steps = std::max(2, static_cast<int>(std::ceil(ecc / 0.02)) + 1);
    if (ecc > 0.0)
        for (int i = 0; i < steps; ++i) grid.push_back(ecc * i / (steps - 1));
    else
        grid.push_back(0.0);
    auto t = track_mode(grid, label, SolveKind::open, cav);
    if (!t.complete()) {
        std::cerr << "tracking failed: " << t.diagnostic << "\n";
        return 1;
    }
    const auto g = make_ellipse(ecc, 1.0);
    const auto h =
        husimi_incident(t.resonances.back(), g, cfg.n, cfg.husimi_ns, cfg.husimi_np);
    const std::string tag = cfg.out_dir + "/husimi_" + label_tag(label);
    io::write_husimi_csv(tag + ".csv", h);
    io::write_husimi_svg(tag + ".svg", h, g, cfg.n);
    return 0;
}

int cmd_analyze(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    if (cfg.pairs.empty()) {
        std::cerr << "warning: empty pair list, nothing to analyze\n";
        return 0;
    }
    RunConfig full = cfg;
    for (const auto& [a, b] : cfg.pairs)
        for (const auto& l : {a, b}) {
            bool known = false;
            for (const auto& k : full.labels) known = known || k == l;
            if (!known)
                throw std::runtime_error("pair references unknown label (m=" +
                                         std::to_string(l.m) + ", l=" + std::to_string(l.ell) +
                                         ")");
        }
    const auto tr = track_all(full);
    auto find = [&](const ModeLabel& l) -> std::size_t {
        for (std::size_t i = 0; i < full.labels.size(); ++i)
            if (full.labels[i] == l) return i;
        throw std::logic_error("label lookup");
    };
    for (const auto& [a, b] : cfg.pairs) {
        const std::size_t ia = find(a), ib = find(b);
        auto pc = compare_pair(tr.closed[tr.closed_index(closed_partner(a))], tr.open[ia],
                               tr.closed[tr.closed_index(closed_partner(b))], tr.open[ib],
                               cfg.critical(), cfg.husimi_ns, cfg.husimi_np);
        const std::string tag =
            cfg.out_dir + "/pair_" + label_tag(a) + "__" + label_tag(b);
        io::open_out(tag + ".json") << io::pair_comparison_json(pc).dump(2) << '\n';
        io::write_pair_svg(tag + ".svg", pc);
    }
    return tr.truncated ? 1 : 0;
}

void print_schema() {
    std::cout << "trajectories.csv: e,m,l,kind,parity,re_kr,im_kr,residual\n"
                 "self_energy.csv:  e,m,l,s_e   (s_e = Re kR_closed(|m-1|,l)/n - Re kR_open(m,l),"
                 " signed, labeled by the open mode)\n"
                 "modes.csv:        e,m,l,kind,parity,re_kr,im_kr,residual,q\n"
                 "psos.csv:         trajectory,bounce,s,p\n"
                 "husimi_*.csv:     s,p,weight  (normalized density on [0,1)x[-1,1])\n"
                 "crossings.json:   [{label_a,label_b,e_min_gap,min_gap,delta_cross,events[]}]\n"
                 "pair_*.json:      {labels,e_grid,delta_se[],d_b[],e_zero[],e_dbmin,db_min,"
                 "q_j[],q_k[],degenerate}\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elliptic dielectric microcavity toolkit"};
    app.require_subcommand(0, 1);

    bool schema = false;
    app.add_flag("--schema", schema, "print output file schemas and exit");

    std::string config_path, out_override;
    int threads = 1;
    double ecc = 0.0, n_index = 3.3;
    int seeds = 40, bounces = 200;
    int label_m = 0, label_l = 1;

    auto add_common = [&](CLI::App* c, bool needs_config) {
        auto* opt = c->add_option("--config", config_path, "JSON run configuration");
        if (needs_config) opt->required();
        c->add_option("--out", out_override, "output directory (overrides config)");
        c->add_option("--threads", threads, "worker threads");
    };

    auto* psos = app.add_subcommand("psos", "classical Poincare surface of section");
    psos->add_option("--ecc", ecc, "eccentricity")->required();
    psos->add_option("--n", n_index, "refractive index for the critical line");
    psos->add_option("--seeds", seeds, "number of seed momenta");
    psos->add_option("--bounces", bounces, "bounces per seed");
    add_common(psos, false);

    auto* modes = app.add_subcommand("modes", "solve the configured modes at one eccentricity");
    modes->add_option("--ecc", ecc, "eccentricity");
    add_common(modes, true);

    auto* sweep = app.add_subcommand("sweep", "track all configured modes over the e-grid");
    add_common(sweep, true);

    auto* husimi = app.add_subcommand("husimi", "boundary Husimi map of one open mode");
    husimi->add_option("--m", label_m, "azimuthal index")->required();
    husimi->add_option("--l", label_l, "radial index")->required();
    husimi->add_option("--ecc", ecc, "eccentricity");
    add_common(husimi, true);

    auto* analyze = app.add_subcommand("analyze", "pairwise self-energy / D_B comparison");
    add_common(analyze, true);

    CLI11_PARSE(app, argc, argv);

    if (schema) {
        print_schema();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 0;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (threads > 0) cfg.threads = threads;

        if (psos->parsed())
            return cmd_psos(ecc, n_index, seeds, bounces,
                            out_override.empty() ? cfg.out_dir : out_override);
        if (modes->parsed()) return cmd_modes(cfg, ecc);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (husimi->parsed()) return cmd_husimi(cfg, {label_m, label_l}, ecc);
        if (analyze->parsed()) return cmd_analyze(cfg);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
