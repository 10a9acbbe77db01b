#ifndef SMALLFIBER_SPHERE_MAP_HPP
#define SMALLFIBER_SPHERE_MAP_HPP

#include "smallfiber/common.hpp"
#include "smallfiber/rng.hpp"
#include "smallfiber/slicer.hpp"
#include "smallfiber/tree_core.hpp"
#include "smallfiber/tree_map.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace smallfiber {

// Point on the boundary of [0,1]^{n+1}. face = 2*axis + side with side 1 the high wall;
// local drops the pinned axis and lives in [0,1]^n.
struct BoundaryPoint {
    int face = 0;
    Vector local;
    Vector ambient;
};

inline int face_axis(int face) { return face / 2; }
inline int face_side(int face) { return face % 2; }

// Radial homeomorphism S^n -> boundary of [0,1]^{n+1}: u maps to c + lambda u with c the
// cube center and lambda = (1/2) / max_i |u_i|. Ties pick the smallest axis index.
BoundaryPoint sphere_to_cube(const Vector& u);
Vector cube_to_sphere(const Vector& ambient);
Vector face_to_ambient(int n, int face, const Vector& local);
Vector ambient_to_face(int face, const Vector& ambient);

// Linear screen p(x) = (v_1 . x, ..., v_{q-1} . x) with Gaussian rows, redrawn until the
// transversality margin clears 1e-8. M = max |p| over the cube's vertices bounds |p| on the
// whole cube by convexity.
struct ProjectionSpec {
    Matrix v;  // (q-1) x (n+1)
    double M = 1.0;
    int resample_count = 0;
};

// Smallest singular value, over all axis pairs i < j, of the column-normalized matrix
// [e_i, e_j, v_1, ..., v_{q-1}]; positive iff every such family has full rank q + 1.
double transversality_margin(const Matrix& v, int n);

ProjectionSpec build_projection(int n, int q, Rng& rng);

// Collar budget for a target fiber volume epsilon: delta = epsilon / (4 (n + 1)).
double choose_parameters(int n, int q, double epsilon);

// One map f : S^n -> R^q assembled from the radial face split, a recursive tree map per
// face, the layered tree embedding, and the projection offsets. The glued tree is kept
// implicit (2(n+1) branches, arity 2^n, depth r); r is the smallest depth whose leaf-scale
// cross sections fit the epsilon budget, vmax.bound() * 2^{-r(n-q)} <= epsilon / 2^n
// (r = 0 when n = q, where fibers are finite).
struct SmallFiberMap {
    int n = 2;
    int q = 2;
    double epsilon = 0.1;
    std::uint64_t seed = 0;
    int r = 0;
    double delta = 0.0;
    ProjectionSpec proj;
    TreeMapSpec face_map;
    TreeShape shape;
    double d = kInf;
    VmaxCertificate vmax;

    double offset_scale() const { return std::isfinite(d) ? 0.25 * d : 0.25; }
};

SmallFiberMap build_small_fiber_map(int n, int q, double epsilon, std::uint64_t seed,
                                    std::optional<int> r_override = {},
                                    std::optional<double> delta_override = {},
                                    Index vmax_resolution = 512);

// Layered layout position (x1, x2) of a tree point, closed form.
Vector shape_embed_point(const TreeShape& shape, const TreePointRef& p, double root_slab = 1.0);

Vector eval_f(const SmallFiberMap& map, const Vector& u);
// Same map evaluated directly at a cube boundary point (the audit-side sampling domain).
Vector eval_f_boundary(const SmallFiberMap& map, const BoundaryPoint& b);

// One connected preimage piece of a value y: the tree point (branch = face), the recovered
// offset, and the within-face fiber geometry.
struct FiberComponent {
    TreePointRef point;
    Vector offset;
    FiberDescriptor desc;
    int face = 0;
};

// All components of f^{-1}(y), found by slab-window descent of the implicit layout. The
// shared glue point (s = 0 at level 0) expands to one component per face.
std::vector<FiberComponent> fiber_of_f(const SmallFiberMap& map, const Vector& y,
                                       double tol = 1e-9);

// Face-local slice data of one component: the fiber boxes in [0,1]^n and the offset
// constraints v_local . x = offset - side * v_axis restricted to the face.
struct SlicedComponent {
    std::vector<Box> faces;
    HyperplaneSystem system;
    FiberDescriptor desc;
    int face = 0;
};

SlicedComponent slice_component(const SmallFiberMap& map, const FiberComponent& comp);

// Exact total measure of f^{-1}(y) in dimension n - q, summed over components; counts
// ill-conditioned pieces into degenerate_out when given. For n = q use component counts.
double fiber_measure(const SmallFiberMap& map, const std::vector<FiberComponent>& comps,
                     Index* degenerate_out = nullptr);

nlohmann::json smallfiber_to_json(const SmallFiberMap& map);
SmallFiberMap smallfiber_from_json(const nlohmann::json& j);

}  // namespace smallfiber

#endif
