#include "smallfiber/sphere_lab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

namespace smallfiber {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(-1.0, x)); }

// Geodesic distance between unit vectors; stable at both ends of the range.
double geo_dist(const Vector& a, const Vector& b) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
}

Vector unit_axis(int n, const Vector& axis) {
    require(axis.size() == n + 1, "region: axis dimension must be n + 1");
    const double norm = axis.norm();
    require(norm > 1e-12, "region: axis must be nonzero");
    return axis / norm;
}

void check_region(const RegionOracle& r) {
    require(r.n >= 1, "region: n >= 1 required");
    require(static_cast<bool>(r.member) && static_cast<bool>(r.distance),
            "region: member and distance must be set");
}

}  // namespace

RegionOracle whole_sphere_region(int n) {
    require(n >= 1, "whole_sphere_region: n >= 1 required");
    RegionOracle r;
    r.n = n;
    r.member = [](const Vector&) { return true; };
    r.distance = [](const Vector&) { return 0.0; };
    return r;
}

RegionOracle cap_region(int n, const Vector& center, double rho) {
    require(rho >= 0.0 && rho <= kPi, "cap_region: rho in [0, pi] required");
    const Vector c = unit_axis(n, center);
    RegionOracle r;
    r.n = n;
    r.member = [c, rho](const Vector& u) { return geo_dist(u, c) <= rho; };
    r.distance = [c, rho](const Vector& u) { return std::max(0.0, geo_dist(u, c) - rho); };
    return r;
}

RegionOracle subsphere_region(int n, int q) {
    require(n >= 1 && q >= 1 && q <= n, "subsphere_region: 1 <= q <= n required");
    RegionOracle r;
    r.n = n;
    // dist(u, S^{n-q}) = atan2(|tail|, |head|): the nearest subsphere point is the
    // normalized head, so cos(dist) = |head|.
    const auto dist = [n, q](const Vector& u) {
        const double tail = u.tail(q).norm();
        const double head = u.head(n + 1 - q).norm();
        return std::atan2(tail, head);
    };
    r.member = [dist](const Vector& u) { return dist(u) <= 1e-12; };
    r.distance = dist;
    return r;
}

RegionOracle latitude_region(int n, double height) {
    require(n >= 1 && std::abs(height) <= 1.0, "latitude_region: |height| <= 1 required");
    const double lat0 = std::asin(height);
    RegionOracle r;
    r.n = n;
    // Latitude is 1-Lipschitz on the sphere and meridians realize the difference.
    const auto dist = [n, lat0](const Vector& u) {
        return std::abs(std::asin(clamp01(u[n])) - lat0);
    };
    r.member = [dist](const Vector& u) { return dist(u) <= 1e-12; };
    r.distance = dist;
    return r;
}

RegionOracle band_region(int n, double eps) {
    require(n >= 1 && eps >= 0.0 && eps <= kPi / 2, "band_region: eps in [0, pi/2] required");
    RegionOracle r;
    r.n = n;
    r.member = [n, eps](const Vector& u) { return std::abs(std::asin(clamp01(u[n]))) <= eps; };
    r.distance = [n, eps](const Vector& u) {
        return std::max(0.0, std::abs(std::asin(clamp01(u[n]))) - eps);
    };
    return r;
}

RegionOracle sublevel_region(int n, const Vector& axis, double c) {
    require(std::abs(c) <= 1.0, "sublevel_region: |c| <= 1 required");
    const Vector a = unit_axis(n, axis);
    const double latc = std::asin(c);
    RegionOracle r;
    r.n = n;
    r.member = [a, c](const Vector& u) { return a.dot(u) <= c; };
    r.distance = [a, latc](const Vector& u) {
        return std::max(0.0, std::asin(clamp01(a.dot(u))) - latc);
    };
    return r;
}

RegionOracle superlevel_region(int n, const Vector& axis, double c) {
    require(std::abs(c) <= 1.0, "superlevel_region: |c| <= 1 required");
    const Vector a = unit_axis(n, axis);
    const double latc = std::asin(c);
    RegionOracle r;
    r.n = n;
    r.member = [a, c](const Vector& u) { return a.dot(u) >= c; };
    r.distance = [a, latc](const Vector& u) {
        return std::max(0.0, latc - std::asin(clamp01(a.dot(u))));
    };
    return r;
}

RegionOracle union_region(const RegionOracle& a, const RegionOracle& b) {
    check_region(a);
    check_region(b);
    require(a.n == b.n, "union_region: dimensions must match");
    RegionOracle r;
    r.n = a.n;
    r.cloud_resolution = std::max(a.cloud_resolution, b.cloud_resolution);
    r.member = [ma = a.member, mb = b.member](const Vector& u) { return ma(u) || mb(u); };
    r.distance = [da = a.distance, db = b.distance](const Vector& u) {
        return std::min(da(u), db(u));
    };
    return r;
}

RegionOracle cloud_region(int n, const Matrix& points, double resolution) {
    require(n >= 1, "cloud_region: n >= 1 required");
    require(points.rows() >= 1 && points.cols() == n + 1,
            "cloud_region: points must be rows in R^{n+1}");
    require(resolution >= 0.0, "cloud_region: resolution >= 0 required");
    auto cloud = std::make_shared<Matrix>(points);
    for (Index i = 0; i < cloud->rows(); ++i) {
        const double norm = cloud->row(i).norm();
        require(norm > 1e-12, "cloud_region: zero cloud point");
        cloud->row(i) /= norm;
    }
    RegionOracle r;
    r.n = n;
    r.cloud_resolution = std::max(resolution, 1e-12);
    // Nearest cloud point maximizes the dot product with u.
    const auto dist = [cloud](const Vector& u) {
        return std::acos(clamp01(((*cloud) * u).maxCoeff()));
    };
    r.member = [dist, tol = r.cloud_resolution](const Vector& u) { return dist(u) <= tol; };
    r.distance = dist;
    return r;
}

NeighborhoodEstimate nbhd_volume_mc(const RegionOracle& region, double eps,
                                    std::int64_t samples, std::uint64_t seed) {
    check_region(region);
    require(eps > 0.0, "nbhd_volume_mc: eps > 0 required");
    require(samples >= 1000, "nbhd_volume_mc: at least 1000 samples required");
    std::int64_t hits = 0;
    for_each_chunk(seed, samples, [&](Rng& rng, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i)
            if (region.distance(rng.sphere_point(region.n)) <= eps) ++hits;
    });
    const double total = sphere_volume(region.n);
    const double frac = static_cast<double>(hits) / static_cast<double>(samples);
    NeighborhoodEstimate est;
    est.epsilon = eps;
    est.samples = samples;
    est.volume = frac * total;
    est.std_err = total * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
    est.resolution_warning = region.cloud_resolution > eps / 10.0;
    return est;
}

double cap_volume(int n, double rho) {
    require(n >= 1, "cap_volume: n >= 1 required");
    require(rho >= 0.0 && rho <= kPi, "cap_volume: rho in [0, pi] required");
    if (rho == 0.0) return 0.0;
    const double shell = sphere_volume(n - 1);
    return shell * integrate([n](double t) { return std::pow(std::sin(t), n - 1); }, 0.0, rho);
}

double equator_tube_volume(int n, int q, double eps) {
    require(n >= 1 && q >= 1 && q <= n, "equator_tube_volume: 1 <= q <= n required");
    require(eps > 0.0 && eps <= kPi / 2, "equator_tube_volume: eps in (0, pi/2] required");
    const double factor = sphere_volume(n - q) * sphere_volume(q - 1);
    return factor * integrate(
                        [n, q](double t) {
                            return std::pow(std::cos(t), n - q) * std::pow(std::sin(t), q - 1);
                        },
                        0.0, eps);
}

GeqNbdReport geqnbd_compare(const RegionOracle& big, const RegionOracle& small,
                            const std::vector<double>& eps_grid, std::int64_t samples,
                            std::uint64_t seed) {
    check_region(big);
    check_region(small);
    require(big.n == small.n, "geqnbd_compare: dimensions must match");
    require(!eps_grid.empty(), "geqnbd_compare: eps grid must be nonempty");
    GeqNbdReport report;
    report.consistent = true;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        GeqNbdRow row;
        row.epsilon = eps_grid[i];
        row.lhs = nbhd_volume_mc(big, row.epsilon, samples, derive_seed(seed, 2 * i));
        row.rhs = nbhd_volume_mc(small, row.epsilon, samples, derive_seed(seed, 2 * i + 1));
        const double band = 3.0 * std::hypot(row.lhs.std_err, row.rhs.std_err);
        row.consistent = row.lhs.volume >= row.rhs.volume - band;
        report.consistent = report.consistent && row.consistent;
        report.rows.push_back(row);
    }
    return report;
}

namespace {

// Geodesic midpoint bisection toward the membership boundary of `region`, starting from
// inside ∈ region, outside ∉ region (never antipodal). The limit lies on the topological
// boundary; with a closed cover X ∪ Y = S^n it lies in X ∩ Y.
Vector bisect_boundary(const RegionOracle& region, Vector inside, Vector outside) {
    for (int it = 0; it < 80; ++it) {
        Vector mid = inside + outside;
        const double norm = mid.norm();
        if (norm < 1e-9) break;
        mid /= norm;
        (region.member(mid) ? inside : outside) = mid;
    }
    Vector mid = inside + outside;
    return mid / mid.norm();
}

}  // namespace

Matrix intersection_cloud(const RegionOracle& x, const RegionOracle& y, Index pairs,
                          std::uint64_t seed, double* resolution_out) {
    check_region(x);
    check_region(y);
    require(x.n == y.n, "intersection_cloud: dimensions must match");
    require(pairs >= 1, "intersection_cloud: pairs >= 1 required");
    const int n = x.n;
    Rng rng(derive_seed(seed, 0));
    std::vector<Vector> x_only, y_only, cloud;
    const std::int64_t budget = std::max<std::int64_t>(1000000, 512 * pairs);
    Index made = 0;
    for (std::int64_t draw = 0; draw < budget && made < pairs; ++draw) {
        const Vector u = rng.sphere_point(n);
        const bool in_x = x.member(u);
        const bool in_y = y.member(u);
        if (in_x && !in_y)
            x_only.push_back(u);
        else if (in_y && !in_x)
            y_only.push_back(u);
        while (!x_only.empty() && !y_only.empty() && made < pairs) {
            const Vector a = x_only.back();
            const Vector b = y_only.back();
            x_only.pop_back();
            y_only.pop_back();
            if ((a + b).norm() < 1e-6) continue;  // skip near-antipodal pairs
            // Both one-sided limits; their union covers the boundary of X ∩ Y.
            cloud.push_back(bisect_boundary(x, a, b));
            cloud.push_back(bisect_boundary(y, b, a));
            ++made;
        }
    }
    require(!cloud.empty(),
            "intersection_cloud: no boundary pairs found; supply an analytic intersection");
    Matrix points(static_cast<Index>(cloud.size()), n + 1);
    for (Index i = 0; i < points.rows(); ++i)
        points.row(i) = cloud[static_cast<std::size_t>(i)].transpose();

    if (resolution_out != nullptr) {
        // Covering-radius estimate: fresh bisection probes against the stored cloud.
        double res = 0.0;
        Index probes = 0;
        x_only.clear();
        y_only.clear();
        const Index want = std::min<Index>(pairs, 128);
        for (std::int64_t draw = 0; draw < budget && probes < want; ++draw) {
            const Vector u = rng.sphere_point(n);
            const bool in_x = x.member(u);
            const bool in_y = y.member(u);
            if (in_x && !in_y)
                x_only.push_back(u);
            else if (in_y && !in_x)
                y_only.push_back(u);
            while (!x_only.empty() && !y_only.empty() && probes < want) {
                const Vector a = x_only.back();
                const Vector b = y_only.back();
                x_only.pop_back();
                y_only.pop_back();
                if ((a + b).norm() < 1e-6) continue;
                const Vector z = bisect_boundary(x, a, b);
                res = std::max(res, std::acos(clamp01((points * z).maxCoeff())));
                ++probes;
            }
        }
        *resolution_out = std::max(res, 1e-12);
    }
    return points;
}

namespace {

struct VolumeEstimate {
    double volume = 0.0;
    double std_err = 0.0;
};

}  // namespace

DecompositionReport check_decomposition(const RegionOracle& x, const RegionOracle& y,
                                        const RegionOracle& intersection, double eps,
                                        std::int64_t samples, std::uint64_t seed) {
    check_region(x);
    check_region(y);
    check_region(intersection);
    require(x.n == y.n && x.n == intersection.n,
            "check_decomposition: dimensions must match");
    require(eps > 0.0, "check_decomposition: eps > 0 required");
    require(samples >= 1000, "check_decomposition: at least 1000 samples required");
    const int n = x.n;
    const double total = sphere_volume(n);

    // One pass for coverage and the three plain membership volumes.
    std::int64_t in_x = 0, in_y = 0, in_both = 0, covered = 0;
    for_each_chunk(derive_seed(seed, 0), samples,
                   [&](Rng& rng, std::int64_t begin, std::int64_t end) {
                       for (std::int64_t i = begin; i < end; ++i) {
                           const Vector u = rng.sphere_point(n);
                           const bool mx = x.member(u);
                           const bool my = y.member(u);
                           in_x += mx;
                           in_y += my;
                           in_both += mx && my;
                           covered += mx || my;
                       }
                   });
    DecompositionReport report;
    report.epsilon = eps;
    report.samples = samples;
    report.coverage_fraction = static_cast<double>(covered) / static_cast<double>(samples);
    require(covered == samples, "check_decomposition: X union Y does not cover the sphere");

    const auto plain = [&](std::int64_t hits) {
        const double frac = static_cast<double>(hits) / static_cast<double>(samples);
        VolumeEstimate est;
        est.volume = frac * total;
        est.std_err = total * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
        return est;
    };
    const VolumeEstimate vol_x = plain(in_x);
    const VolumeEstimate vol_y = plain(in_y);
    const VolumeEstimate vol_xy = plain(in_both);

    const NeighborhoodEstimate nx = nbhd_volume_mc(x, eps, samples, derive_seed(seed, 1));
    const NeighborhoodEstimate ny = nbhd_volume_mc(y, eps, samples, derive_seed(seed, 2));
    const NeighborhoodEstimate nxy =
        nbhd_volume_mc(intersection, eps, samples, derive_seed(seed, 3));

    report.lhs = nxy.volume;
    report.rhs = nx.volume - vol_x.volume + ny.volume - vol_y.volume + vol_xy.volume;
    report.std_err = std::sqrt(nxy.std_err * nxy.std_err + nx.std_err * nx.std_err +
                               ny.std_err * ny.std_err + vol_x.std_err * vol_x.std_err +
                               vol_y.std_err * vol_y.std_err + vol_xy.std_err * vol_xy.std_err);
    report.cloud_resolution = intersection.cloud_resolution;
    report.consistent = std::abs(report.lhs - report.rhs) <= 3.0 * report.std_err;
    return report;
}

DecompositionReport check_decomposition(const RegionOracle& x, const RegionOracle& y, double eps,
                                        std::int64_t samples, std::uint64_t seed) {
    check_region(x);
    check_region(y);
    require(x.n == y.n, "check_decomposition: dimensions must match");
    // Detect one-sided containment first: then X ∩ Y is the smaller region itself.
    Rng probe(derive_seed(seed, 101));
    std::int64_t x_only = 0, y_only = 0;
    for (int i = 0; i < 4096; ++i) {
        const Vector u = probe.sphere_point(x.n);
        const bool mx = x.member(u);
        const bool my = y.member(u);
        x_only += mx && !my;
        y_only += my && !mx;
    }
    if (x_only == 0)  // X ⊆ Y statistically, so X ∩ Y = X
        return check_decomposition(x, y, x, eps, samples, seed);
    if (y_only == 0)
        return check_decomposition(x, y, y, eps, samples, seed);

    double resolution = 0.0;
    const Matrix cloud = intersection_cloud(x, y, 1024, derive_seed(seed, 102), &resolution);
    RegionOracle inter = cloud_region(x.n, cloud, resolution);
    // Interior intersection points (positive-measure overlaps) are members outright; the
    // cloud carries the boundary portion that membership alone cannot see.
    const auto cloud_dist = inter.distance;
    inter.member = [mx = x.member, my = y.member](const Vector& u) { return mx(u) && my(u); };
    inter.distance = [mx = x.member, my = y.member, cloud_dist](const Vector& u) {
        if (mx(u) && my(u)) return 0.0;
        return cloud_dist(u);
    };
    return check_decomposition(x, y, inter, eps, samples, seed);
}

ScalarMap height_map(int n) {
    require(n >= 1, "height_map: n >= 1 required");
    ScalarMap f;
    f.n = n;
    f.value = [n](const Vector& u) { return 0.5 * (u[n] + 1.0); };
    return f;
}

ScalarMap reparam_height_map(int n) {
    ScalarMap f = height_map(n);
    f.value = [h = f.value](const Vector& u) {
        const double t = h(u);
        return t * t * (3.0 - 2.0 * t);
    };
    return f;
}

ScalarMap tilted_height_map(int n, double amount, int axis) {
    require(axis >= 0 && axis <= n, "tilted_height_map: axis in [0, n] required");
    ScalarMap f = height_map(n);
    f.value = [h = f.value, amount, axis](const Vector& u) { return h(u) + amount * u[axis]; };
    return f;
}

ScalarMap plateau_height_map(int n, double lo, double hi) {
    require(lo < hi, "plateau_height_map: lo < hi required");
    ScalarMap f = height_map(n);
    f.value = [h = f.value, lo, hi](const Vector& u) {
        return std::min(hi, std::max(lo, h(u)));
    };
    return f;
}

namespace {

// Point cloud on the level set f^{-1}(t): direct members where the level carries volume,
// plus membership bisection between strict sub- and super-level samples.
RegionOracle level_set_cloud(const ScalarMap& f, double t, std::uint64_t seed) {
    const int n = f.n;
    Rng rng(seed);
    std::vector<Vector> cloud, below, above;
    const Index want = 1024;
    RegionOracle sub;  // bisection tracks the closed sublevel set
    sub.n = n;
    sub.member = [fv = f.value, t](const Vector& u) { return fv(u) <= t; };
    sub.distance = [](const Vector&) { return 0.0; };
    for (std::int64_t draw = 0; draw < 400000 && static_cast<Index>(cloud.size()) < want;
         ++draw) {
        const Vector u = rng.sphere_point(n);
        const double v = f.value(u);
        if (v == t) {
            cloud.push_back(u);
            continue;
        }
        (v < t ? below : above).push_back(u);
        while (!below.empty() && !above.empty() && static_cast<Index>(cloud.size()) < want) {
            const Vector a = below.back();
            const Vector b = above.back();
            below.pop_back();
            above.pop_back();
            if ((a + b).norm() < 1e-6) continue;
            cloud.push_back(bisect_boundary(sub, a, b));
        }
    }
    require(!cloud.empty(), "level_set_cloud: level set not found by sampling");
    Matrix points(static_cast<Index>(cloud.size()), n + 1);
    for (Index i = 0; i < points.rows(); ++i)
        points.row(i) = cloud[static_cast<std::size_t>(i)].transpose();
    // Crude covering-radius estimate: max nearest-neighbor gap from a probe subset.
    double res = 0.0;
    const Index step = std::max<Index>(1, points.rows() / 64);
    for (Index i = 0; i < points.rows(); i += step) {
        double best = kPi;
        for (Index j = 0; j < points.rows(); ++j) {
            if (j == i) continue;
            best = std::min(best, std::acos(clamp01(points.row(i).dot(points.row(j)))));
        }
        res = std::max(res, best);
    }
    RegionOracle level = cloud_region(n, points, std::max(res, 1e-9));
    const auto cloud_dist = level.distance;
    level.member = [fv = f.value, t](const Vector& u) { return fv(u) == t; };
    level.distance = [fv = f.value, t, cloud_dist](const Vector& u) {
        if (fv(u) == t) return 0.0;  // interior of a plateau level
        return cloud_dist(u);
    };
    return level;
}

}  // namespace

Codim1Report check_codim1(const ScalarMap& f, double y, std::int64_t samples,
                          std::uint64_t seed) {
    require(f.n >= 1 && static_cast<bool>(f.value), "check_codim1: map must be set");
    require(y > 0.0 && y <= 0.5, "check_codim1: 0 < y <= 1/2 required");
    require(samples >= 1000, "check_codim1: at least 1000 samples required");
    const int n = f.n;
    const double total = sphere_volume(n);
    // Analytic comparison volumes: p^{-1}[0, y] is the cap u_last <= 2y - 1.
    const double cap = cap_volume(n, std::acos(1.0 - 2.0 * y));

    std::vector<double> values(static_cast<std::size_t>(samples));
    for_each_chunk(derive_seed(seed, 0), samples,
                   [&](Rng& rng, std::int64_t begin, std::int64_t end) {
                       for (std::int64_t i = begin; i < end; ++i)
                           values[static_cast<std::size_t>(i)] = f.value(rng.sphere_point(n));
                   });
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    // alpha = sup{t : Vol f^{-1}(-inf, t) <= Vol p^{-1}[0, y]} on the empirical measure;
    // the bisection limit is the order statistic at the target count. beta symmetric.
    const double target_frac = cap / total;
    const auto quantile = [&](double frac) {
        const std::int64_t k = std::llround(frac * static_cast<double>(samples));
        const std::int64_t idx = std::min<std::int64_t>(std::max<std::int64_t>(k, 0), samples - 1);
        return sorted[static_cast<std::size_t>(idx)];
    };
    Codim1Report report;
    report.y = y;
    report.samples = samples;
    report.alpha = quantile(target_frac);
    report.beta = quantile(1.0 - target_frac);
    if (report.beta < report.alpha) report.beta = report.alpha;

    std::int64_t band = 0;
    for (const double v : values) band += (v >= report.alpha && v <= report.beta);
    const double band_frac = static_cast<double>(band) / static_cast<double>(samples);
    report.band_volume = band_frac * total;
    report.target_volume = total - 2.0 * cap;
    report.std_err =
        total * std::sqrt(band_frac * (1.0 - band_frac) / static_cast<double>(samples));
    report.raw_margin = report.band_volume - report.target_volume;
    report.margin = report.raw_margin + 3.0 * report.std_err;
    report.consistent = report.margin >= 0.0;

    // Monotonicity of independently re-estimated sublevel volumes across a t-grid.
    const double lo = sorted.front(), hi = sorted.back();
    const std::int64_t grid_samples = std::max<std::int64_t>(1000, samples / 10);
    double prev = -kInf, prev_se = 0.0;
    for (int g = 0; g <= 10; ++g) {
        const double t = lo + (hi - lo) * g / 10.0;
        std::int64_t hits = 0;
        for_each_chunk(derive_seed(seed, 200 + static_cast<std::uint64_t>(g)), grid_samples,
                       [&](Rng& rng, std::int64_t begin, std::int64_t end) {
                           for (std::int64_t i = begin; i < end; ++i)
                               hits += f.value(rng.sphere_point(n)) <= t;
                       });
        const double frac = static_cast<double>(hits) / static_cast<double>(grid_samples);
        const double se =
            total * std::sqrt(frac * (1.0 - frac) / static_cast<double>(grid_samples));
        const double vol = frac * total;
        if (vol < prev - 3.0 * std::hypot(se, prev_se)) report.monotone = false;
        prev = vol;
        prev_se = se;
    }

    // Per-level neighborhood comparison against the circle p^{-1}(y).
    const RegionOracle target = latitude_region(n, 2.0 * y - 1.0);
    const std::vector<double> eps_grid{0.2, 0.4};
    const std::int64_t side_samples = std::max<std::int64_t>(2000, samples / 100);
    report.levels = {report.alpha, 0.5 * (report.alpha + report.beta), report.beta};
    for (std::size_t li = 0; li < report.levels.size(); ++li) {
        const RegionOracle level =
            level_set_cloud(f, report.levels[li], derive_seed(seed, 300 + li));
        GeqNbdReport cmp = geqnbd_compare(level, target, eps_grid, side_samples,
                                          derive_seed(seed, 400 + li));
        report.consistent = report.consistent && cmp.consistent;
        report.level_reports.push_back(std::move(cmp));
    }
    return report;
}

nlohmann::json nbhd_estimate_to_json(const NeighborhoodEstimate& e) {
    return nlohmann::json{{"epsilon", e.epsilon},
                          {"samples", e.samples},
                          {"volume", e.volume},
                          {"std_err", e.std_err},
                          {"resolution_warning", e.resolution_warning}};
}

nlohmann::json geqnbd_report_to_json(const GeqNbdReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const GeqNbdRow& row : r.rows)
        rows.push_back(nlohmann::json{{"epsilon", row.epsilon},
                                      {"lhs", nbhd_estimate_to_json(row.lhs)},
                                      {"rhs", nbhd_estimate_to_json(row.rhs)},
                                      {"consistent", row.consistent}});
    return nlohmann::json{{"rows", rows}, {"consistent", r.consistent}};
}

nlohmann::json decomposition_report_to_json(const DecompositionReport& r) {
    return nlohmann::json{{"epsilon", r.epsilon},
                          {"samples", r.samples},
                          {"lhs", r.lhs},
                          {"rhs", r.rhs},
                          {"std_err", r.std_err},
                          {"coverage_fraction", r.coverage_fraction},
                          {"cloud_resolution", r.cloud_resolution},
                          {"consistent", r.consistent}};
}

nlohmann::json codim1_report_to_json(const Codim1Report& r) {
    nlohmann::json levels = nlohmann::json::array();
    for (const double t : r.levels) levels.push_back(t);
    nlohmann::json reports = nlohmann::json::array();
    for (const GeqNbdReport& g : r.level_reports) reports.push_back(geqnbd_report_to_json(g));
    return nlohmann::json{{"y", r.y},
                          {"samples", r.samples},
                          {"alpha", r.alpha},
                          {"beta", r.beta},
                          {"band_volume", r.band_volume},
                          {"target_volume", r.target_volume},
                          {"std_err", r.std_err},
                          {"raw_margin", r.raw_margin},
                          {"margin", r.margin},
                          {"monotone", r.monotone},
                          {"consistent", r.consistent},
                          {"levels", levels},
                          {"level_reports", reports}};
}

}  // namespace smallfiber
