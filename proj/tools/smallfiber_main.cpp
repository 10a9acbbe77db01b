#include <CLI11.hpp>

#include "smallfiber/audit.hpp"
#include "smallfiber/sphere_lab.hpp"
#include "smallfiber/svg.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace smallfiber;

namespace {

// Exit codes: 0 success, 1 usage or domain error, 2 numerical-degeneracy flag,
// 3 verdict failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitVerdict = 3;

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file_atomic(out_path, content);
}

SmallFiberMap load_bundle(const std::string& path) {
    return smallfiber_from_json(nlohmann::json::parse(read_file(path)));
}

Vector parse_vector(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    Vector v(static_cast<Index>(values.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = values[static_cast<std::size_t>(i)];
    return v;
}

struct BuildArgs {
    int n = 0;
    int q = 0;
    double epsilon = 0.1;
    double delta = 0.0;
    int r = -1;
    std::uint64_t seed = 0;
    Index vmax_resolution = 512;
    std::string out;
};

int run_build(const BuildArgs& a, bool have_q) {
    if (have_q) {
        if (!(a.n > a.q && a.q > 1)) {
            std::cerr << "build: n > q > 1 required (got n=" << a.n << ", q=" << a.q << ")\n";
            return kExitUsage;
        }
        std::optional<int> r_override;
        if (a.r >= 0) r_override = a.r;
        std::optional<double> delta_override;
        if (a.delta > 0.0) delta_override = a.delta;
        const SmallFiberMap map = build_small_fiber_map(a.n, a.q, a.epsilon, a.seed, r_override,
                                                        delta_override, a.vmax_resolution);
        emit(a.out, smallfiber_to_json(map).dump(2) + "\n");
        std::cerr << "built map: n=" << map.n << " q=" << map.q << " r=" << map.r
                  << " branches=" << map.shape.branches << "\n";
        return kExitOk;
    }
    // Tree-map-only bundle: q absent, r and delta required.
    if (a.r < 0 || a.delta <= 0.0) {
        std::cerr << "build: tree-map-only build needs --r and --delta\n";
        return kExitUsage;
    }
    const TreeMapSpec spec = build_tree_map(a.n, a.r, a.delta);
    emit(a.out, treemap_to_json(spec).dump(2) + "\n");
    return kExitOk;
}

struct AuditArgs {
    std::string bundle;
    std::int64_t samples = 10000;
    std::uint64_t seed = 0;
    std::vector<double> thresholds;
    bool sphere_side = false;
    std::string out;
};

int run_audit_cmd(const AuditArgs& a) {
    const SmallFiberMap map = load_bundle(a.bundle);
    AuditOptions options;
    options.samples = a.samples;
    options.seed = a.seed;
    options.thresholds = a.thresholds;
    options.sphere_side = a.sphere_side;
    const AuditReport report = run_audit(map, options);
    emit(a.out, audit_report_to_json(report).dump(2) + "\n");
    return report.degenerate_flag ? kExitDegenerate : kExitOk;
}

struct RenderArgs {
    int n = 2;
    int r = 2;
    double delta = 0.05;
    Index resolution = 800;
    std::string out;
};

int run_render(const RenderArgs& a) {
    if (a.n != 2) {
        std::cerr << "render-svg: n = 2 only\n";
        return kExitUsage;
    }
    const TreeMapSpec spec = build_tree_map(2, a.r, a.delta);
    emit(a.out, render_fiber_classes_svg(spec, a.resolution));
    return kExitOk;
}

struct VerifyArgs {
    std::string suite;
    std::int64_t samples = 100000;
    std::uint64_t seed = 0;
    std::string out;
    std::string chart;
};

Vector unit_z(int n) {
    Vector v = Vector::Zero(n + 1);
    v[n] = 1.0;
    return v;
}

int run_verify(const VerifyArgs& a) {
    nlohmann::json results = nlohmann::json::array();
    bool all_ok = true;
    std::string failing;
    const auto record = [&](const std::string& instance, bool ok, nlohmann::json detail) {
        results.push_back(
            {{"instance", instance}, {"consistent", ok}, {"detail", std::move(detail)}});
        if (!ok && failing.empty()) failing = instance;
        all_ok = all_ok && ok;
    };

    if (a.suite == "tubes") {
        const std::vector<std::pair<int, int>> shapes{{2, 1}, {3, 1}, {3, 2}};
        std::uint64_t stream = 0;
        ChartSeries exact_series{"exact", "#2255cc", {}};
        ChartSeries mc_series{"mc", "#cc2222", {}};
        for (const auto& [n, q] : shapes)
            for (const double eps : {0.1, 0.3, 0.6}) {
                const double exact = equator_tube_volume(n, q, eps);
                const NeighborhoodEstimate est = nbhd_volume_mc(
                    subsphere_region(n, q), eps, a.samples, derive_seed(a.seed, stream++));
                const bool ok = std::abs(est.volume - exact) <= 3 * est.std_err;
                if (n == 3 && q == 2) {
                    exact_series.points.emplace_back(eps, exact);
                    mc_series.points.emplace_back(eps, est.volume);
                }
                record("tube n=" + std::to_string(n) + " q=" + std::to_string(q) +
                           " eps=" + std::to_string(eps),
                       ok,
                       {{"exact", exact},
                        {"mc", est.volume},
                        {"std_err", est.std_err},
                        {"warning", est.resolution_warning}});
            }
        if (!a.chart.empty())
            write_file_atomic(a.chart,
                              render_line_chart_svg("tube volume vs eps (S^3 great circle)",
                                                    "eps", "volume", {exact_series, mc_series}));
    } else if (a.suite == "isoperimetric") {
        // Two caps against the equal-volume single cap.
        const double rho = 0.5;
        const double target = 2.0 * cap_volume(2, rho);
        double lo = rho, hi = kPi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cap_volume(2, mid) < target ? lo : hi) = mid;
        }
        const RegionOracle two_caps = union_region(cap_region(2, unit_z(2), rho),
                                                   cap_region(2, -unit_z(2), rho));
        const RegionOracle one_cap = cap_region(2, unit_z(2), 0.5 * (lo + hi));
        const GeqNbdReport caps = geqnbd_compare(two_caps, one_cap, {0.1, 0.2, 0.4}, a.samples,
                                                 derive_seed(a.seed, 1));
        record("two caps vs equal-volume cap", caps.consistent, geqnbd_report_to_json(caps));

        const GeqNbdReport equator_vs_point =
            geqnbd_compare(subsphere_region(2, 1), cap_region(2, unit_z(2), 0.0),
                           {0.1, 0.3, 0.6}, a.samples, derive_seed(a.seed, 2));
        record("equator vs point", equator_vs_point.consistent,
               geqnbd_report_to_json(equator_vs_point));

        const RegionOracle band = band_region(2, 0.2);
        const GeqNbdReport self =
            geqnbd_compare(band, band, {0.2}, a.samples, derive_seed(a.seed, 3));
        record("band vs itself", self.consistent, geqnbd_report_to_json(self));
    } else if (a.suite == "decomposition") {
        const Vector up = unit_z(2);
        const DecompositionReport hemi = check_decomposition(
            superlevel_region(2, up, 0.0), sublevel_region(2, up, 0.0), latitude_region(2, 0.0),
            0.3, a.samples, derive_seed(a.seed, 1));
        record("hemispheres (analytic equator)", hemi.consistent,
               decomposition_report_to_json(hemi));

        const RegionOracle cap = cap_region(2, Vector(Vector::Ones(3)), 0.7);
        const DecompositionReport whole = check_decomposition(
            whole_sphere_region(2), cap, cap, 0.25, a.samples, derive_seed(a.seed, 2));
        record("whole sphere with cap", whole.consistent, decomposition_report_to_json(whole));

        Vector tilted(3);
        tilted << 0.4, 0.0, 1.0;
        const DecompositionReport gen = check_decomposition(
            sublevel_region(2, tilted, 0.15), superlevel_region(2, tilted, 0.15), 0.3, a.samples,
            derive_seed(a.seed, 3));
        record("tilted half spaces (cloud intersection)", gen.consistent,
               decomposition_report_to_json(gen));
    } else if (a.suite == "codim1") {
        const Codim1Report base = check_codim1(height_map(2), 0.25, a.samples,
                                               derive_seed(a.seed, 1));
        record("height baseline", base.consistent && std::abs(base.raw_margin) <= 3 * base.std_err,
               codim1_report_to_json(base));

        const Codim1Report rep = check_codim1(reparam_height_map(2), 0.25, a.samples,
                                              derive_seed(a.seed, 2));
        record("reparameterized height", rep.consistent, codim1_report_to_json(rep));

        const Codim1Report tilt = check_codim1(tilted_height_map(2, 0.2, 1), 0.25, a.samples,
                                               derive_seed(a.seed, 3));
        record("tilted height", tilt.consistent && tilt.margin > 0.0,
               codim1_report_to_json(tilt));

        const Codim1Report plateau = check_codim1(plateau_height_map(2, 0.35, 0.65), 0.25,
                                                  a.samples, derive_seed(a.seed, 4));
        record("plateau height", plateau.consistent && plateau.margin > 0.0,
               codim1_report_to_json(plateau));
    } else {
        std::cerr << "verify-appendix: unknown suite '" << a.suite
                  << "' (expected isoperimetric, decomposition, codim1, or tubes)\n";
        return kExitUsage;
    }

    const nlohmann::json report{{"schema", "appendix/1"},
                                {"suite", a.suite},
                                {"samples", a.samples},
                                {"seed", a.seed},
                                {"consistent", all_ok},
                                {"results", results}};
    emit(a.out, report.dump(2) + "\n");
    if (!all_ok) {
        std::cerr << "verify-appendix: inconsistent verdict in instance '" << failing << "'\n";
        return kExitVerdict;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recursive tree maps, thickened embeddings, and sphere-side checks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file mirroring the flags");
    int rc = kExitOk;

    BuildArgs build_args;
    CLI::App* build = app.add_subcommand("build", "build a map bundle and write it as JSON");
    build->add_option("--n", build_args.n, "domain dimension")->required();
    CLI::Option* q_opt = build->add_option("--q", build_args.q, "target dimension");
    build->add_option("--epsilon", build_args.epsilon, "volume budget");
    build->add_option("--delta", build_args.delta, "tree map delta override");
    build->add_option("--r", build_args.r, "recursion depth override");
    build->add_option("--seed", build_args.seed, "projection seed");
    build->add_option("--resolution", build_args.vmax_resolution, "cross-section scan knots");
    build->add_option("--out", build_args.out, "output path (stdout when absent)");
    build->callback([&]() { rc = run_build(build_args, q_opt->count() > 0); });

    AuditArgs audit_args;
    CLI::App* audit = app.add_subcommand("audit", "sample fiber volumes of a built map");
    audit->add_option("--bundle", audit_args.bundle, "bundle JSON path")->required();
    audit->add_option("--samples", audit_args.samples, "surface sample count");
    audit->add_option("--seed", audit_args.seed, "audit seed");
    audit->add_option("--threshold", audit_args.thresholds, "histogram threshold (repeatable)");
    audit->add_flag("--sphere-side", audit_args.sphere_side,
                    "sample the round sphere instead of the cube boundary");
    audit->add_option("--out", audit_args.out, "output path (stdout when absent)");
    audit->callback([&]() { rc = run_audit_cmd(audit_args); });

    RenderArgs render_args;
    CLI::App* render = app.add_subcommand("render-svg", "draw the fiber classes of the n=2 map");
    render->add_option("--n", render_args.n, "domain dimension (must be 2)");
    render->add_option("--r", render_args.r, "recursion depth");
    render->add_option("--delta", render_args.delta, "collar budget");
    render->add_option("--resolution", render_args.resolution, "figure size in pixels");
    render->add_option("--out", render_args.out, "output path (stdout when absent)");
    render->callback([&]() { rc = run_render(render_args); });

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify-appendix", "run the sphere-side check suites");
    verify->add_option("--suite", verify_args.suite,
                       "isoperimetric | decomposition | codim1 | tubes")
        ->required();
    verify->add_option("--samples", verify_args.samples, "Monte-Carlo sample count");
    verify->add_option("--seed", verify_args.seed, "suite seed");
    verify->add_option("--out", verify_args.out, "report path (stdout when absent)");
    verify->add_option("--chart", verify_args.chart, "optional SVG line chart path");
    verify->callback([&]() { rc = run_verify(verify_args); });

    std::string eval_bundle, eval_point;
    CLI::App* eval = app.add_subcommand("eval", "evaluate the map at a sphere point");
    eval->add_option("--bundle", eval_bundle, "bundle JSON path")->required();
    eval->add_option("--point", eval_point, "comma-separated point in R^{n+1}")->required();
    eval->callback([&]() {
        const SmallFiberMap map = load_bundle(eval_bundle);
        const Vector u = parse_vector(eval_point);
        const Vector y = eval_f(map, u / u.norm());
        nlohmann::json out = nlohmann::json::array();
        for (Index i = 0; i < y.size(); ++i) out.push_back(y[i]);
        std::cout << out.dump() << "\n";
    });

    std::string fiber_bundle, fiber_y;
    CLI::App* fiber = app.add_subcommand("fiber", "list fiber components over an image point");
    fiber->add_option("--bundle", fiber_bundle, "bundle JSON path")->required();
    fiber->add_option("--y", fiber_y, "comma-separated image point in R^q")->required();
    fiber->callback([&]() {
        const SmallFiberMap map = load_bundle(fiber_bundle);
        const Vector y = parse_vector(fiber_y);
        const auto comps = fiber_of_f(map, y);
        nlohmann::json out = nlohmann::json::array();
        for (const FiberComponent& comp : comps) {
            nlohmann::json digits = nlohmann::json::array();
            for (const int d : comp.point.edge.digits) digits.push_back(d);
            nlohmann::json offset = nlohmann::json::array();
            for (Index i = 0; i < comp.offset.size(); ++i) offset.push_back(comp.offset[i]);
            out.push_back({{"face", comp.face},
                           {"digits", digits},
                           {"s", comp.point.s},
                           {"offset", offset},
                           {"volume", fiber_volume(map.n, comp.desc)}});
        }
        std::cout << out.dump(2) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return rc;
}
