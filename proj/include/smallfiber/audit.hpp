#ifndef SMALLFIBER_AUDIT_HPP
#define SMALLFIBER_AUDIT_HPP

#include "smallfiber/rng.hpp"
#include "smallfiber/sphere_map.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace smallfiber {

struct AuditOptions {
    std::int64_t samples = 10000;
    std::uint64_t seed = 0;
    // Fiber-volume histogram thresholds; defaults to {eps/4, eps/2, eps, 2 eps, 4 eps}.
    std::vector<double> thresholds;
    // Sample the round sphere instead of the cube boundary. The cube boundary is the
    // native measure; sphere-side results differ by an unquantified bi-Lipschitz factor.
    bool sphere_side = false;
};

struct HistogramBin {
    double threshold = 0.0;
    double fraction = 0.0;
};

struct AuditReport {
    // Map identity echo.
    int n = 0;
    int q = 0;
    double epsilon = 0.0;
    std::uint64_t map_seed = 0;
    int r = 0;
    double delta = 0.0;
    // Audit arguments.
    std::int64_t samples = 0;
    std::uint64_t audit_seed = 0;
    bool sphere_side = false;
    // Results.
    double small_fiber_fraction = 0.0;  // fraction of samples with fiber volume <= epsilon
    double fraction_std_err = 0.0;
    double max_fiber_volume = 0.0;
    double certified_component_bound = 0.0;  // certified single cross-section maximum
    Index multiplicity_bound = 0;            // max component count of any fiber
    double certified_total_bound = 0.0;      // multiplicity_bound * component bound
    Index max_multiplicity_seen = 0;
    std::int64_t degenerate_samples = 0;
    double degenerate_fraction = 0.0;
    bool degenerate_flag = false;  // degenerate fraction above 1%
    std::vector<HistogramBin> histogram;
    double runtime_ms = 0.0;  // measured wall clock; kept out of the deterministic payload
};

// Uniform point on the boundary of I^{n+1}: faces are congruent n-cubes, so a uniform
// face pick plus a uniform in-face point is surface-uniform.
BoundaryPoint sample_cube_boundary(int n, Rng& rng);

AuditReport run_audit(const SmallFiberMap& map, const AuditOptions& options);

// {"schema": "audit/1", "payload": {deterministic fields}, "runtime_ms": wall clock}.
// Byte-comparing two runs means comparing the payload dumps.
nlohmann::json audit_report_to_json(const AuditReport& report);

}  // namespace smallfiber

#endif
