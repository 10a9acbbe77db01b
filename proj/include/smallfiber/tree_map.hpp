#ifndef SMALLFIBER_TREE_MAP_HPP
#define SMALLFIBER_TREE_MAP_HPP

#include "smallfiber/common.hpp"
#include "smallfiber/tree_core.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace smallfiber {

// Axis-aligned box given by corner vectors; degenerate axes (lo == hi) are allowed and
// represent flat pieces embedded in a higher-dimensional ambient space.
struct Box {
    Vector lo;
    Vector hi;
    int dim() const;  // number of non-degenerate axes
};

// Subcube of I^n reached after `level` descent steps: position offset, side length scale.
struct CubeFrame {
    Vector offset;
    double scale = 1.0;
    int level = 0;
};

enum class FiberKind { SinglePoint, CubeBoundary, Skeleton };

// Geometry of one fiber class. For CubeBoundary, side is the absolute side length of the
// concentric cube whose boundary is the fiber; for Skeleton, side is the absolute cell side
// of the 2x...x2 array whose codimension-1 skeleton is the fiber; s is the within-edge
// parameter that produced the fiber.
struct FiberDescriptor {
    FiberKind kind = FiberKind::CubeBoundary;
    CubeFrame frame;
    double s = 0.0;
    double side = 0.0;
};

// Recursive map I^n -> T_{n,r}. Points within the level-k collar (closed delta1-neighborhood
// of the frame boundary) land on the level-k trunk edge at s = dist/delta1; the inner cube
// splits into 2^n subcubes of side (1-2*delta1)/2 that recurse with half the budget. At
// level r the map is the boundary distance itself (edge identified with [0, 1/2]).
struct TreeMapSpec {
    int n = 1;
    int r = 0;
    double delta = 0.0;
    std::vector<double> delta_level;  // budget delta^{(k)}, k = 0..r
    std::vector<double> collar;       // collar width delta1^{(k)} = delta^{(k)}/(4n), k = 0..r-1
    std::vector<double> scale;        // frame side s_k = prod_{j<k} (1-2*delta1^{(j)})/2, k = 0..r

    TreeShape shape() const { return TreeShape{1, 1 << n, r}; }
};

enum class WallTieBreak { Low, High };  // Low = lexicographically smallest subcube (default)

TreeMapSpec build_tree_map(int n, int r, double delta);

// Descends to the canonical tree point of x (branch 0). The tie-break only affects points
// exactly on subdivision walls and must not change the resulting tree point.
TreePointRef eval_tree_map(const TreeMapSpec& spec, const Vector& x,
                           WallTieBreak tie = WallTieBreak::Low);

CubeFrame frame_at(const TreeMapSpec& spec, const std::vector<int>& digits);

FiberDescriptor fiber_of(const TreeMapSpec& spec, const TreePointRef& p);

// Finitely many flat boxes covering the fiber exactly, pairwise non-overlapping except on
// measure-zero sets: 2n faces for a cube boundary, 3n*2^{n-1} cells for a skeleton.
std::vector<Box> fiber_faces(int n, const FiberDescriptor& desc);

// Exact (n-1)-volume: 2n*side^{n-1}, 3n*2^{n-1}*side^{n-1}, or 0 for a point.
double fiber_volume(int n, const FiberDescriptor& desc);

// Volume of the set of points whose fiber is not a cube boundary of side <= scale[r]
// (the union of all collars); exact closed form 1 - prod_{k<r} (1-2*delta1^{(k)})^n.
double exceptional_volume(const TreeMapSpec& spec);

// Exceptional fraction of the level-l subproblem, relative to its own frame.
double exceptional_level_fraction(const TreeMapSpec& spec, int level);

// Exact volume of the set of points whose fiber is a cube boundary of side <= threshold.
double small_fiber_coverage(const TreeMapSpec& spec, double side_threshold);

std::string treemap_to_toml(const TreeMapSpec& spec);
TreeMapSpec treemap_from_toml(const std::string& text);

nlohmann::json treemap_to_json(const TreeMapSpec& spec);

}  // namespace smallfiber

#endif
