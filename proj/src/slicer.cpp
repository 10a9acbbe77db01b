#include "smallfiber/slicer.hpp"

#include "smallfiber/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace smallfiber {

namespace {

std::vector<int> free_axes(const Box& box) {
    std::vector<int> f;
    for (Eigen::Index i = 0; i < box.lo.size(); ++i)
        if (box.hi[i] > box.lo[i]) f.push_back(static_cast<int>(i));
    return f;
}

double box_diameter(const Box& box) { return (box.hi - box.lo).norm(); }

// Affine dimension of a vertex set, by singular values of the centered matrix.
int affine_dim(const Matrix& vertices, double scale) {
    const Eigen::Index v = vertices.rows();
    if (v <= 1) return 0;
    Matrix centered = vertices.bottomRows(v - 1);
    for (Eigen::Index i = 0; i < v - 1; ++i) centered.row(i) -= vertices.row(0);
    Eigen::JacobiSVD<Matrix> svd(centered);
    const double tol = 1e-8 * std::max(1.0, std::max(svd.singularValues()[0], scale));
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++rank;
    return rank;
}

// Orthonormal direction basis (D x k) spanning the vertex set's affine hull.
Matrix direction_basis(const Matrix& vertices, int k) {
    const Eigen::Index v = vertices.rows();
    Matrix centered = vertices.bottomRows(v - 1);
    for (Eigen::Index i = 0; i < v - 1; ++i) centered.row(i) -= vertices.row(0);
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeFullV);
    return svd.matrixV().leftCols(k);
}

double polygon_area(const Matrix& vertices) {
    const Eigen::Index v = vertices.rows();
    if (v < 3) return 0.0;
    const Matrix basis = direction_basis(vertices, 2);
    const Vector origin = vertices.row(0);
    Matrix plane(v, 2);
    for (Eigen::Index i = 0; i < v; ++i)
        plane.row(i) = (Vector(vertices.row(i)) - origin).transpose() * basis;
    const double cx = plane.col(0).mean(), cy = plane.col(1).mean();
    std::vector<Eigen::Index> order(v);
    for (Eigen::Index i = 0; i < v; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::atan2(plane(a, 1) - cy, plane(a, 0) - cx) <
               std::atan2(plane(b, 1) - cy, plane(b, 0) - cx);
    });
    double twice = 0.0;
    for (Eigen::Index i = 0; i < v; ++i) {
        const Eigen::Index a = order[i], b = order[(i + 1) % v];
        twice += plane(a, 0) * plane(b, 1) - plane(b, 0) * plane(a, 1);
    }
    return 0.5 * std::abs(twice);
}

double max_pairwise_distance(const Matrix& vertices) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < vertices.rows(); ++i)
        for (Eigen::Index j = i + 1; j < vertices.rows(); ++j)
            best = std::max(best, (vertices.row(i) - vertices.row(j)).norm());
    return best;
}

// Volume in the prescribed dimension m; lower-dimensional slices measure zero.
double volume_at_dim(const Box& box, const HyperplaneSystem& sys, const SlicePolytope& poly,
                     int m);

double polytope_volume_3d(const Box& box, const HyperplaneSystem& sys,
                          const SlicePolytope& poly) {
    const Vector centroid = poly.vertices.colwise().mean();
    double vol = 0.0;
    for (int axis : free_axes(box)) {
        for (int side = 0; side < 2; ++side) {
            Box wall = box;
            const double w = side ? box.hi[axis] : box.lo[axis];
            wall.lo[axis] = w;
            wall.hi[axis] = w;
            const SlicePolytope facet = slice_box(wall, sys);
            if (facet.cardinality() < 3 || facet.dim < 2) continue;
            const double area = volume_at_dim(wall, sys, facet, 2);
            if (area <= 0.0) continue;
            const Matrix basis = direction_basis(facet.vertices, 2);
            const Vector rel = centroid - Vector(facet.vertices.row(0));
            const double h = (rel - basis * (basis.transpose() * rel)).norm();
            vol += h * area / 3.0;
        }
    }
    return vol;
}

double volume_at_dim(const Box& box, const HyperplaneSystem& sys, const SlicePolytope& poly,
                     int m) {
    if (poly.empty() || poly.dim < m) return 0.0;
    require(poly.dim == m, "volume_at_dim: slice dimension exceeds the target measure");
    switch (m) {
        case 0:
            return 0.0;
        case 1:
            return max_pairwise_distance(poly.vertices);
        case 2:
            return polygon_area(poly.vertices);
        case 3:
            return polytope_volume_3d(box, sys, poly);
        default:
            require(false, "volume_at_dim: dimensions above 3 are not supported");
            return 0.0;
    }
}

void corner_projection_range(const Box& box, const Vector& w, double& lo, double& hi) {
    double base = 0.0;
    lo = hi = 0.0;
    for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
        base += w[i] * box.lo[i];
        const double span = w[i] * (box.hi[i] - box.lo[i]);
        if (span >= 0.0)
            hi += span;
        else
            lo += span;
    }
    lo += base;
    hi += base;
}

}  // namespace

SlicePolytope slice_box(const Box& box, const HyperplaneSystem& sys) {
    const int D = static_cast<int>(box.lo.size());
    require(box.hi.size() == D, "slice_box: box corner dimensions differ");
    require(sys.ambient() == D, "slice_box: system ambient dimension mismatch");
    const int K = sys.codim();
    require(K >= 1, "slice_box: at least one constraint required");
    for (int i = 0; i < D; ++i)
        require(box.lo[i] <= box.hi[i], "slice_box: box has inverted corners");

    const std::vector<int> free = free_axes(box);
    const int dbox = static_cast<int>(free.size());
    const double scale = std::max(1.0, box_diameter(box));
    const double ftol = kFeasTol * scale;

    SlicePolytope poly;
    poly.ambient_dim = D;
    std::vector<Vector> found;

    if (K > dbox) {
        // Overdetermined on this box's affine hull: zero or one point, via least squares.
        Matrix wf(K, std::max(dbox, 1));
        Vector rhs = sys.offsets;
        for (int i = 0; i < D; ++i)
            if (box.hi[i] <= box.lo[i]) rhs -= sys.normals.col(i) * box.lo[i];
        if (dbox == 0) {
            if (rhs.cwiseAbs().maxCoeff() <= ftol) found.push_back(box.lo);
        } else {
            for (int j = 0; j < dbox; ++j) wf.col(j) = sys.normals.col(free[j]);
            Eigen::JacobiSVD<Matrix> svd(wf, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Vector sol = svd.solve(rhs);
            if ((wf * sol - rhs).cwiseAbs().maxCoeff() <= ftol) {
                Vector x = box.lo;
                bool ok = true;
                for (int j = 0; j < dbox; ++j) {
                    const int a = free[j];
                    if (sol[j] < box.lo[a] - ftol || sol[j] > box.hi[a] + ftol) ok = false;
                    x[a] = std::clamp(sol[j], box.lo[a], box.hi[a]);
                }
                if (ok) found.push_back(x);
            }
        }
    } else {
        // Choose K free axes to solve; pin the remaining free axes to walls.
        std::vector<int> pick(K);
        std::vector<int> rest;
        auto emit = [&]() {
            Matrix A(K, K);
            for (int j = 0; j < K; ++j) A.col(j) = sys.normals.col(pick[j]);
            Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const double smax = svd.singularValues()[0];
            const double smin = svd.singularValues()[K - 1];
            if (smin <= smax * 1e-14 || smax == 0.0) return;  // no isolated vertex here
            if (smax > smin * kCondThreshold) poly.degenerate = true;
            rest.clear();
            for (int a : free)
                if (std::find(pick.begin(), pick.end(), a) == pick.end()) rest.push_back(a);
            const int combos = 1 << rest.size();
            for (int mask = 0; mask < combos; ++mask) {
                Vector x = box.lo;
                Vector rhs = sys.offsets;
                for (int i = 0; i < D; ++i)
                    if (box.hi[i] <= box.lo[i]) rhs -= sys.normals.col(i) * box.lo[i];
                for (std::size_t t = 0; t < rest.size(); ++t) {
                    const int a = rest[t];
                    x[a] = ((mask >> t) & 1) ? box.hi[a] : box.lo[a];
                    rhs -= sys.normals.col(a) * x[a];
                }
                const Vector sol = svd.solve(rhs);
                bool ok = true;
                for (int j = 0; j < K; ++j) {
                    const int a = pick[j];
                    if (sol[j] < box.lo[a] - ftol || sol[j] > box.hi[a] + ftol) ok = false;
                }
                if (!ok) continue;
                for (int j = 0; j < K; ++j)
                    x[pick[j]] = std::clamp(sol[j], box.lo[pick[j]], box.hi[pick[j]]);
                found.push_back(x);
            }
        };
        // Lexicographic K-subsets of the free axes.
        std::vector<int> idx(K);
        for (int j = 0; j < K; ++j) idx[j] = j;
        while (true) {
            for (int j = 0; j < K; ++j) pick[j] = free[idx[j]];
            emit();
            int j = K - 1;
            while (j >= 0 && idx[j] == dbox - K + j) --j;
            if (j < 0) break;
            ++idx[j];
            for (int t = j + 1; t < K; ++t) idx[t] = idx[t - 1] + 1;
        }
    }

    // Dedup within kDedupTol * scale.
    std::vector<Vector> unique;
    for (const Vector& v : found) {
        bool dup = false;
        for (const Vector& u : unique)
            if ((u - v).cwiseAbs().maxCoeff() <= kDedupTol * scale) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(v);
    }
    poly.vertices.resize(unique.size(), D);
    for (std::size_t i = 0; i < unique.size(); ++i) poly.vertices.row(i) = unique[i];
    poly.dim = affine_dim(poly.vertices, scale);
    return poly;
}

double polytope_volume(const SlicePolytope& poly) {
    if (poly.empty() || poly.dim == 0) return 0.0;
    if (poly.dim == 1) return max_pairwise_distance(poly.vertices);
    if (poly.dim == 2) return polygon_area(poly.vertices);
    require(false, "polytope_volume: three dimensional slices need the carrier box overload");
    return 0.0;
}

double polytope_volume(const Box& box, const HyperplaneSystem& sys, const SlicePolytope& poly) {
    if (poly.empty()) return 0.0;
    return volume_at_dim(box, sys, poly, poly.dim);
}

double slice_volume_mc(const Box& box, const HyperplaneSystem& sys, double tau,
                       std::int64_t samples, std::uint64_t seed) {
    const int D = static_cast<int>(box.lo.size());
    require(sys.ambient() == D, "slice_volume_mc: system ambient dimension mismatch");
    require(tau > 0.0, "slice_volume_mc: tau > 0 required");
    require(samples > 0, "slice_volume_mc: samples > 0 required");
    const int K = sys.codim();
    const std::vector<int> free = free_axes(box);
    const int dbox = static_cast<int>(free.size());
    require(K <= dbox, "slice_volume_mc: more constraints than free axes");

    Matrix wf(K, dbox);
    for (int j = 0; j < dbox; ++j) wf.col(j) = sys.normals.col(free[j]);
    Vector shift = sys.offsets;
    for (int i = 0; i < D; ++i)
        if (box.hi[i] <= box.lo[i]) shift -= sys.normals.col(i) * box.lo[i];
    const Matrix gram = wf * wf.transpose();
    const double det = gram.determinant();
    require(det > 1e-30, "slice_volume_mc: constraints are degenerate on the box");

    double box_vol = 1.0;
    for (int a : free) box_vol *= box.hi[a] - box.lo[a];

    std::int64_t hits = 0;
    for_each_chunk(seed, samples, [&](Rng& rng, std::int64_t begin, std::int64_t end) {
        Vector x(dbox);
        for (std::int64_t i = begin; i < end; ++i) {
            for (int j = 0; j < dbox; ++j)
                x[j] = rng.uniform(box.lo[free[j]], box.hi[free[j]]);
            const Vector resid = wf * x - shift;
            if (resid.cwiseAbs().maxCoeff() <= tau) ++hits;
        }
    });
    const double frac = static_cast<double>(hits) / static_cast<double>(samples);
    return box_vol * frac * std::sqrt(det) / std::pow(2.0 * tau, K);
}

namespace {

// Certified sup bound for one constraint: vol^{1/m} is concave in the offset
// (Brunn-Minkowski), so exact grid values plus one-sided chord slopes dominate the gaps.
VmaxCertificate vmax_one_constraint(const Box& box, const Vector& w, Index resolution) {
    const std::vector<int> free = free_axes(box);
    const int dbox = static_cast<int>(free.size());
    const int m = dbox - 1;
    VmaxCertificate cert;
    cert.certified = true;

    double clo, chi;
    corner_projection_range(box, w, clo, chi);
    if (chi <= clo) {  // w vanishes on the box's free axes
        cert.resolution = 1;
        return cert;
    }

    // Grid: uniform points plus every vertex projection (support endpoints and kinks).
    std::vector<double> grid;
    for (Index i = 0; i <= resolution; ++i)
        grid.push_back(clo + (chi - clo) * static_cast<double>(i) / resolution);
    const int corners = 1 << dbox;
    for (int c = 0; c < corners; ++c) {
        double t = 0.0;
        for (Eigen::Index i = 0, b = 0; i < box.lo.size(); ++i) {
            if (box.hi[i] > box.lo[i]) {
                t += w[i] * (((c >> b) & 1) ? box.hi[i] : box.lo[i]);
                ++b;
            } else {
                t += w[i] * box.lo[i];
            }
        }
        grid.push_back(t);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [&](double a, double b) { return b - a <= 1e-13 * (chi - clo); }),
               grid.end());

    HyperplaneSystem sys;
    sys.normals = w.transpose();
    sys.offsets = Vector::Constant(1, 0.0);

    const std::size_t G = grid.size();
    std::vector<double> vol(G, 0.0);
    for (std::size_t i = 0; i < G; ++i) {
        sys.offsets[0] = grid[i];
        const SlicePolytope poly = slice_box(box, sys);
        cert.max_cardinality = std::max(cert.max_cardinality, poly.cardinality());
        vol[i] = volume_at_dim(box, sys, poly, m);
        if (vol[i] > cert.value) cert.value = vol[i];
    }
    cert.resolution = static_cast<Index>(G);
    if (m == 0) return cert;  // sections are points; value stays 0 by convention

    std::vector<double> g(G);
    for (std::size_t i = 0; i < G; ++i) g[i] = std::pow(vol[i], 1.0 / m);
    auto slope = [&](std::size_t i) {  // chord slope on [grid[i], grid[i+1]]
        return (g[i + 1] - g[i]) / (grid[i + 1] - grid[i]);
    };
    double gbound = *std::max_element(g.begin(), g.end());
    for (std::size_t i = 0; i + 1 < G; ++i) {
        const double h = grid[i + 1] - grid[i];
        double from_left = kInf, from_right = kInf;
        if (i >= 1) from_left = g[i] + std::max(0.0, slope(i - 1)) * h;
        if (i + 2 < G) from_right = g[i + 1] + std::max(0.0, -slope(i + 1)) * h;
        const double cap = std::min(from_left, from_right);
        if (std::isfinite(cap)) gbound = std::max(gbound, cap);
    }
    const double vbound = std::pow(gbound, m);
    cert.padding = std::max(0.0, vbound - cert.value) + 1e-12 * std::max(1.0, cert.value);
    return cert;
}

// Two or more constraints: located by grid refinement, padding is an estimate only.
VmaxCertificate vmax_refine(const Box& box, const Matrix& directions, Index resolution) {
    const int K = static_cast<int>(directions.rows());
    const std::vector<int> free = free_axes(box);
    const int m = static_cast<int>(free.size()) - K;
    require(m >= 0, "max_cross_section_volume: more constraints than free axes");

    VmaxCertificate cert;
    cert.certified = false;
    Vector clo(K), chi(K);
    for (int k = 0; k < K; ++k) {
        double lo, hi;
        corner_projection_range(box, Vector(directions.row(k)), lo, hi);
        clo[k] = lo;
        chi[k] = hi;
    }

    HyperplaneSystem sys;
    sys.normals = directions;
    sys.offsets = Vector::Zero(K);

    const int per_axis = std::max<int>(5, static_cast<int>(std::llround(
                                              std::pow(static_cast<double>(resolution),
                                                       1.0 / K))));
    Vector center = 0.5 * (clo + chi);
    Vector half = 0.5 * (chi - clo);
    double prev_best = -1.0;
    for (int round = 0; round < 5; ++round) {
        Vector best_c = center;
        std::vector<int> counter(K, 0);
        while (true) {
            for (int k = 0; k < K; ++k) {
                const double t = per_axis == 1
                                     ? 0.5
                                     : static_cast<double>(counter[k]) / (per_axis - 1);
                sys.offsets[k] =
                    std::clamp(center[k] - half[k] + 2.0 * half[k] * t, clo[k], chi[k]);
            }
            const SlicePolytope poly = slice_box(box, sys);
            cert.max_cardinality = std::max(cert.max_cardinality, poly.cardinality());
            const double v = volume_at_dim(box, sys, poly, m);
            if (v > cert.value) {
                cert.value = v;
                best_c = sys.offsets;
            }
            int k = 0;
            while (k < K && ++counter[k] == per_axis) counter[k++] = 0;
            if (k == K) break;
        }
        cert.resolution = per_axis;
        if (round > 0 && prev_best >= 0.0)
            cert.padding = std::max(cert.padding, cert.value - prev_best);
        prev_best = cert.value;
        center = best_c;
        half *= 2.0 / (per_axis - 1);  // next round spans the best cell's neighborhood
    }
    cert.padding = 2.0 * cert.padding + 0.05 * cert.value;
    return cert;
}

}  // namespace

VmaxCertificate max_cross_section_volume(const Box& box, const Matrix& directions,
                                         Index resolution) {
    require(directions.cols() == box.lo.size(),
            "max_cross_section_volume: direction dimension mismatch");
    require(directions.rows() >= 1, "max_cross_section_volume: at least one direction");
    require(resolution >= 8, "max_cross_section_volume: resolution too small");
    if (directions.rows() == 1)
        return vmax_one_constraint(box, Vector(directions.row(0)), resolution);
    return vmax_refine(box, directions, resolution);
}

double sliced_boxes_volume(const std::vector<Box>& boxes, const HyperplaneSystem& sys,
                           Index* degenerate_out) {
    double total = 0.0;
    Index degenerate = 0;
    for (const Box& b : boxes) {
        const SlicePolytope poly = slice_box(b, sys);
        if (poly.degenerate) ++degenerate;
        total += polytope_volume(b, sys, poly);
    }
    if (degenerate_out) *degenerate_out = degenerate;
    return total;
}

}  // namespace smallfiber
