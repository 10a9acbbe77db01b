#ifndef SMALLFIBER_SLICER_HPP
#define SMALLFIBER_SLICER_HPP

#include "smallfiber/common.hpp"
#include "smallfiber/tree_map.hpp"

#include <cstdint>
#include <vector>

namespace smallfiber {

// K affine constraints w_k . x = c_k in ambient dimension D (rows of normals).
struct HyperplaneSystem {
    Matrix normals;
    Vector offsets;

    int codim() const { return static_cast<int>(normals.rows()); }
    int ambient() const { return static_cast<int>(normals.cols()); }
};

// Convex polytope box ∩ {Wx = c}, stored by its vertex set. dim is the measured affine
// dimension of the vertex set (generically box.dim() - K). degenerate flags any vertex solve
// whose K x K pivot was ill conditioned beyond kCondThreshold; such slices are still
// returned but their volumes should not be trusted blindly.
struct SlicePolytope {
    Matrix vertices;  // V x D, rows are vertices
    int ambient_dim = 0;
    int dim = 0;
    bool degenerate = false;

    Index cardinality() const { return vertices.rows(); }
    bool empty() const { return vertices.rows() == 0; }
};

// Vertex enumeration by pinned subsets: every vertex pins box.dim() - K free axes at a box
// wall and solves the K x K system on the rest. Feasibility kFeasTol, dedup kDedupTol,
// both scaled by the box diameter.
SlicePolytope slice_box(const Box& box, const HyperplaneSystem& sys);

// Exact measure of the polytope in its own affine dimension: 0-dim -> 0 (use cardinality),
// 1-dim -> length, 2-dim -> area by angular-sort fan, 3-dim -> divergence over facets
// obtained by pinning one box axis. Dimensions above 3 are rejected.
double polytope_volume(const SlicePolytope& poly);
double polytope_volume(const Box& box, const HyperplaneSystem& sys, const SlicePolytope& poly);

// Monte Carlo estimate of the same measure: sample the box, count |w_k.x - c_k| <= tau hits,
// and renormalize by the slab cross volume (2 tau)^K / sqrt(det W W^T) with W restricted to
// the box's free axes. Deterministic in (seed); worker-count independent by chunking.
double slice_volume_mc(const Box& box, const HyperplaneSystem& sys, double tau,
                       std::int64_t samples, std::uint64_t seed);

// Upper bound for the section volume sup over offsets c of vol(box ∩ {Wx = c}).
// For one constraint the bound is certified: sections of a convex body have
// vol^{1/m} concave in the offset, so exact grid evaluations plus one-sided chord slopes
// bound the in-between values. For two or more constraints the sup is located by grid
// refinement and padded heuristically; `certified` is false in that case.
struct VmaxCertificate {
    double value = 0.0;      // best exactly-evaluated section volume
    double padding = 0.0;    // value + padding bounds (certified) or estimates (not) the sup
    Index resolution = 0;    // grid points along each offset axis
    bool certified = false;
    Index max_cardinality = 0;  // largest vertex count seen in any section

    double bound() const { return value + padding; }
};

VmaxCertificate max_cross_section_volume(const Box& box, const Matrix& directions,
                                         Index resolution = 512);

// Total exact measure of one system sliced through a list of boxes, with the count of
// degenerate-flagged pieces reported through `degenerate_out` when non-null.
double sliced_boxes_volume(const std::vector<Box>& boxes, const HyperplaneSystem& sys,
                           Index* degenerate_out = nullptr);

}  // namespace smallfiber

#endif
