#ifndef SMALLFIBER_SPHERE_LAB_HPP
#define SMALLFIBER_SPHERE_LAB_HPP

#include "smallfiber/common.hpp"
#include "smallfiber/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace smallfiber {

// Closed region on S^n. membership and geodesic distance-to-set must agree: distance 0 iff
// member, up to cloud_resolution when the distance comes from a point cloud (then > 0).
struct RegionOracle {
    int n = 2;
    std::function<bool(const Vector&)> member;
    std::function<double(const Vector&)> distance;
    double cloud_resolution = 0.0;
};

// Monte-Carlo estimate of the absolute n-volume of a geodesic eps-neighborhood.
struct NeighborhoodEstimate {
    double epsilon = 0.0;
    std::int64_t samples = 0;
    double volume = 0.0;
    double std_err = 0.0;
    bool resolution_warning = false;  // set when cloud resolution is coarser than eps / 10
};

// Shipped analytic regions. Centers and axes are normalized internally.
RegionOracle whole_sphere_region(int n);
RegionOracle cap_region(int n, const Vector& center, double rho);
// Equatorial S^{n-q}: the last q ambient coordinates vanish.
RegionOracle subsphere_region(int n, int q);
// Latitude set {u_last = height} (a point pair when |height| = 1).
RegionOracle latitude_region(int n, double height);
// Closed tube of geodesic radius eps around the equator {u_last = 0}.
RegionOracle band_region(int n, double eps);
// Half spaces cut along latitude: {a.u <= c} and {a.u >= c} for a unit axis a.
RegionOracle sublevel_region(int n, const Vector& axis, double c);
RegionOracle superlevel_region(int n, const Vector& axis, double c);
RegionOracle union_region(const RegionOracle& a, const RegionOracle& b);
// Region represented by sample points (rows of `points`); distance is the nearest cloud
// point, membership is distance within the recorded resolution.
RegionOracle cloud_region(int n, const Matrix& points, double resolution);

NeighborhoodEstimate nbhd_volume_mc(const RegionOracle& region, double eps, std::int64_t samples,
                                    std::uint64_t seed);

// Exact volume of a geodesic cap of radius rho in S^n, by quadrature.
double cap_volume(int n, double rho);
// Exact volume of the geodesic eps-tube around an equatorial S^{n-q} in S^n.
double equator_tube_volume(int n, int q, double eps);

// Per-epsilon comparison "lhs at least rhs in neighborhood volume", within 3 combined
// standard errors. Statistical evidence only, never a proof.
struct GeqNbdRow {
    double epsilon = 0.0;
    NeighborhoodEstimate lhs;
    NeighborhoodEstimate rhs;
    bool consistent = false;
};
struct GeqNbdReport {
    std::vector<GeqNbdRow> rows;
    bool consistent = false;
};
GeqNbdReport geqnbd_compare(const RegionOracle& big, const RegionOracle& small,
                            const std::vector<double>& eps_grid, std::int64_t samples,
                            std::uint64_t seed);

// Checks Vol((X cap Y)_eps) = Vol(X_eps) - Vol(X) + Vol(Y_eps) - Vol(Y) + Vol(X cap Y)
// for closed X, Y with X cup Y = S^n. The overload without an intersection oracle builds
// one from a bisection point cloud between X-only and Y-only samples.
struct DecompositionReport {
    double epsilon = 0.0;
    std::int64_t samples = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double std_err = 0.0;
    double coverage_fraction = 0.0;
    double cloud_resolution = 0.0;  // 0 when the intersection oracle is analytic
    bool consistent = false;
};
DecompositionReport check_decomposition(const RegionOracle& x, const RegionOracle& y,
                                        const RegionOracle& intersection, double eps,
                                        std::int64_t samples, std::uint64_t seed);
DecompositionReport check_decomposition(const RegionOracle& x, const RegionOracle& y, double eps,
                                        std::int64_t samples, std::uint64_t seed);

// Builds a point cloud on the topological boundary shared by X and Y (hence inside X cap Y
// when both are closed and X cup Y covers) by great-circle bisection between X-only and
// Y-only samples. resolution_out receives an estimated covering radius of the cloud.
Matrix intersection_cloud(const RegionOracle& x, const RegionOracle& y, Index pairs,
                          std::uint64_t seed, double* resolution_out = nullptr);

// Continuous scalar test map on S^n.
struct ScalarMap {
    int n = 2;
    std::function<double(const Vector&)> value;
};

// The comparison height p(u) = (u_last + 1) / 2, with p(S^n) = [0, 1].
ScalarMap height_map(int n);
// p composed with the monotone reparameterization t -> t^2 (3 - 2t).
ScalarMap reparam_height_map(int n);
// p + amount * u_axis (generic atom-free perturbation).
ScalarMap tilted_height_map(int n, double amount, int axis);
// p clamped to [lo, hi]; the clamp levels carry positive volume.
ScalarMap plateau_height_map(int n, double lo, double hi);

// Codimension-one comparison of f against the height p at level y <= 1/2. alpha and beta
// are located by bisection of fixed-sample sublevel counts against the analytic cap volume
// of p^{-1}[0, y]; the band volume Vol f^{-1}[alpha, beta] is then compared against
// Vol p^{-1}[y, 1-y]. margin folds the 3 standard-error band in; raw_margin does not.
struct Codim1Report {
    double y = 0.0;
    std::int64_t samples = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double band_volume = 0.0;
    double target_volume = 0.0;
    double std_err = 0.0;
    double raw_margin = 0.0;
    double margin = 0.0;
    bool monotone = true;
    bool consistent = false;
    std::vector<double> levels;             // sampled t in [alpha, beta]
    std::vector<GeqNbdReport> level_reports;  // f^{-1}(t) vs p^{-1}(y) per sampled level
};
Codim1Report check_codim1(const ScalarMap& f, double y, std::int64_t samples,
                          std::uint64_t seed);

nlohmann::json nbhd_estimate_to_json(const NeighborhoodEstimate& e);
nlohmann::json geqnbd_report_to_json(const GeqNbdReport& r);
nlohmann::json decomposition_report_to_json(const DecompositionReport& r);
nlohmann::json codim1_report_to_json(const Codim1Report& r);

}  // namespace smallfiber

#endif
