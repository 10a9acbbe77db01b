#include "smallfiber/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace smallfiber {

BoundaryPoint sample_cube_boundary(int n, Rng& rng) {
    require(n >= 1, "sample_cube_boundary: n >= 1 required");
    const Index faces = 2 * (n + 1);
    Index face = static_cast<Index>(rng.uniform() * static_cast<double>(faces));
    if (face >= faces) face = faces - 1;
    Vector local(n);
    for (int i = 0; i < n; ++i) local[i] = rng.uniform();
    BoundaryPoint b;
    b.face = face;
    b.local = local;
    b.ambient = face_to_ambient(n, face, local);
    return b;
}

AuditReport run_audit(const SmallFiberMap& map, const AuditOptions& options) {
    require(options.samples >= 1, "run_audit: samples >= 1 required");
    const auto start = std::chrono::steady_clock::now();

    AuditReport report;
    report.n = map.n;
    report.q = map.q;
    report.epsilon = map.epsilon;
    report.map_seed = map.seed;
    report.r = map.r;
    report.delta = map.delta;
    report.samples = options.samples;
    report.audit_seed = options.seed;
    report.sphere_side = options.sphere_side;
    // Per-component certificate. Cube-boundary fibers are scaled copies of the unit cube
    // boundary, so their sections obey the certified maximum directly. A skeleton fiber is
    // covered by the 2^n subcube boundaries of its array (cell side h <= scale / 2), each a
    // scaled cube boundary, so its sections are at most 2^n * h^{n-q} times the certificate;
    // the level-0 skeleton dominates.
    report.certified_component_bound = map.vmax.bound();
    if (map.r >= 1) {
        const double h0 = 0.5 - map.face_map.collar.front();
        report.certified_component_bound =
            std::max(report.certified_component_bound,
                     map.vmax.bound() * std::pow(2.0, map.n) *
                         std::pow(h0, map.n - map.q));
    }
    report.multiplicity_bound =
        std::max<Index>(2 * (map.n + 1), (Index{1} << map.n) + 1);
    report.certified_total_bound =
        static_cast<double>(report.multiplicity_bound) * report.certified_component_bound;

    std::vector<double> thresholds = options.thresholds;
    if (thresholds.empty())
        thresholds = {0.25 * map.epsilon, 0.5 * map.epsilon, map.epsilon, 2.0 * map.epsilon,
                      4.0 * map.epsilon};
    std::sort(thresholds.begin(), thresholds.end());
    std::vector<std::int64_t> bin_hits(thresholds.size(), 0);

    std::int64_t small = 0;
    for_each_chunk(options.seed, options.samples,
                   [&](Rng& rng, std::int64_t begin, std::int64_t end) {
                       for (std::int64_t i = begin; i < end; ++i) {
                           const BoundaryPoint b = options.sphere_side
                                                       ? sphere_to_cube(rng.sphere_point(map.n))
                                                       : sample_cube_boundary(map.n, rng);
                           const Vector y = eval_f_boundary(map, b);
                           const auto comps = fiber_of_f(map, y);
                           Index degenerate = 0;
                           const double volume = fiber_measure(map, comps, &degenerate);
                           report.max_fiber_volume = std::max(report.max_fiber_volume, volume);
                           report.max_multiplicity_seen = std::max(
                               report.max_multiplicity_seen, static_cast<Index>(comps.size()));
                           if (degenerate > 0) ++report.degenerate_samples;
                           if (volume <= map.epsilon) ++small;
                           for (std::size_t t = 0; t < thresholds.size(); ++t)
                               if (volume <= thresholds[t]) ++bin_hits[t];
                       }
                   });

    const double count = static_cast<double>(options.samples);
    const double frac = static_cast<double>(small) / count;
    report.small_fiber_fraction = frac;
    report.fraction_std_err = std::sqrt(frac * (1.0 - frac) / count);
    report.degenerate_fraction = static_cast<double>(report.degenerate_samples) / count;
    report.degenerate_flag = report.degenerate_fraction > 0.01;
    for (std::size_t t = 0; t < thresholds.size(); ++t)
        report.histogram.push_back(
            {thresholds[t], static_cast<double>(bin_hits[t]) / count});

    report.runtime_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return report;
}

nlohmann::json audit_report_to_json(const AuditReport& report) {
    nlohmann::json histogram = nlohmann::json::array();
    for (const HistogramBin& bin : report.histogram)
        histogram.push_back({{"threshold", bin.threshold}, {"fraction", bin.fraction}});
    nlohmann::json payload{
        {"n", report.n},
        {"q", report.q},
        {"epsilon", report.epsilon},
        {"map_seed", report.map_seed},
        {"r", report.r},
        {"delta", report.delta},
        {"samples", report.samples},
        {"audit_seed", report.audit_seed},
        {"sphere_side", report.sphere_side},
        {"small_fiber_fraction", report.small_fiber_fraction},
        {"fraction_std_err", report.fraction_std_err},
        {"max_fiber_volume", report.max_fiber_volume},
        {"certified_component_bound", report.certified_component_bound},
        {"multiplicity_bound", report.multiplicity_bound},
        {"certified_total_bound", report.certified_total_bound},
        {"max_multiplicity_seen", report.max_multiplicity_seen},
        {"degenerate_samples", report.degenerate_samples},
        {"degenerate_fraction", report.degenerate_fraction},
        {"degenerate_flag", report.degenerate_flag},
        {"histogram", histogram}};
    return nlohmann::json{
        {"schema", "audit/1"}, {"payload", payload}, {"runtime_ms", report.runtime_ms}};
}

}  // namespace smallfiber
