#ifndef SMALLFIBER_TREE_CORE_HPP
#define SMALLFIBER_TREE_CORE_HPP

#include "smallfiber/common.hpp"

#include <json.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace smallfiber {

// Rooted tree with deterministic DFS ids. Node 0 is the root; edge k ends at node k+1.
// Every edge carries the recursion level of its subtree trunk and the branch it came from
// when trees are glued at their roots (-1 for an unglued build).
struct Tree {
    struct Node {
        Index parent_edge = -1;  // -1 for the root
        int depth = 0;
        int branch = -1;
    };
    struct Edge {
        Index parent_node = 0;
        Index child_node = 0;
        int level = 0;
        int branch = -1;
        double length = 1.0;
    };

    std::vector<Node> nodes;
    std::vector<Edge> edges;
    Index root = 0;
    int arity = 0;                         // daughter count of internal nodes, 2^n for built trees
    std::vector<std::vector<Index>> children;  // node id -> child edge ids, construction order

    Index node_count() const { return static_cast<Index>(nodes.size()); }
    Index edge_count() const { return static_cast<Index>(edges.size()); }
    bool is_leaf_edge(Index e) const { return children[edges[e].child_node].empty(); }
};

// Point on a tree: edge plus parameter s in [0,1], s=0 at the parent endpoint.
// Canonical form: s=0 only on the root's first trunk edge (the root itself); every other
// junction is represented by its parent edge at s=1.
struct TreePoint {
    Index edge = 0;
    double s = 0.0;
};

// Straight-line layered embedding of a tree in R^q. Positions are per node; edges map to
// segments with strictly increasing first coordinate. d is the minimum distance between
// disjoint (no shared endpoint) embedded edges, +inf when no such pair exists. M is the
// thickening radius parameter: offsets x with |x| <= M are scaled into a ball of radius
// offset_scale() transverse to the first axis.
struct EmbeddingSpec {
    Matrix positions;  // node_count x q
    double d = kInf;
    double M = 1.0;
    int q = 2;
    double root_slab = 1.0;

    double offset_scale() const { return std::isfinite(d) ? 0.25 * d : 0.25; }
};

struct LayoutParams {
    double root_slab = 1.0;
    double M = 1.0;
};

// T_{n,r}: a trunk edge plus 2^n copies of T_{n,r-1} with their roots identified with the
// trunk's far endpoint; T_{n,0} is a single edge of length 1/2 (trunk edges have length 1).
Tree build_tree(int n, int r);

// Identifies the roots of the inputs; branch provenance = input index on every copied
// node/edge. Input order fixes the DFS ids.
Tree glue_at_roots(const std::vector<Tree>& trees);

// Degree = daughter count, plus one for the parent edge on non-root vertices.
int max_degree(const Tree& tree);

// Layered layout: node at x1 = depth; daughters split the parent slab (root slab width
// layout.root_slab) into equal sub-slabs and sit at the sub-slab centers in x2; remaining
// coordinates are zero. Requires q >= 2. Fills d exactly by pairwise segment distance.
EmbeddingSpec embed_tree(const Tree& tree, int q, const LayoutParams& layout = {});

// Exact minimum over pairs of edges sharing no endpoint; +inf when no pair qualifies.
double min_disjoint_edge_distance(const Tree& tree, const EmbeddingSpec& emb);

double segment_distance(const Vector& a0, const Vector& a1, const Vector& b0, const Vector& b1);

TreePoint canonical_point(const Tree& tree, TreePoint p);

// phi(p, x) = phi(p, 0) + offset_scale * (0, x / M); requires |x| <= M, x in R^{q-1}.
Vector thicken_eval(const Tree& tree, const EmbeddingSpec& emb, TreePoint p, const Vector& x);

// All (canonical point, offset) preimages of y under thicken_eval. tol applies to the
// first-coordinate match and to the |x| <= M budget.
std::vector<std::pair<TreePoint, Vector>> invert_thicken(const Tree& tree,
                                                         const EmbeddingSpec& emb,
                                                         const Vector& y, double tol = 1e-9);

// Path-length metric: trunk-level edges count 1, leaf edges 1/2 (their recorded lengths).
double tree_distance(const Tree& tree, TreePoint a, TreePoint b);

nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& j);

// ----------------------------------------------------------------------------
// Implicit structural form of the standard family: `branches` daughters at the root
// (1 for a standalone T_{n,r}, 2(n+1) for the glued assembly), `arity` = 2^n daughters at
// every deeper junction, leaf edges at level `depth`. Edge ids, layout positions and the
// disjoint-edge distance all have closed forms, so the tree never has to be materialized.
// ----------------------------------------------------------------------------

struct TreeShape {
    int branches = 1;
    int arity = 2;
    int depth = 0;
};

// Edge address: trunk of branch c has empty digits; appending digit j descends into the
// j-th daughter subtree. level() == digits.size() is the recursion level of the edge.
struct EdgePath {
    int branch = 0;
    std::vector<int> digits;
    int level() const { return static_cast<int>(digits.size()); }
};

struct TreePointRef {
    EdgePath edge;
    double s = 0.0;
};

Index shape_subtree_edges(int arity, int depth);  // 1 + b + ... + b^depth
Index shape_edge_count(const TreeShape& shape);
Index shape_node_count(const TreeShape& shape);

// Slab width at node depth k (k = 0 is the root slab).
double shape_slab_width(const TreeShape& shape, int k, double root_slab = 1.0);

// Closed-form min disjoint-edge distance of the layered layout; +inf when the shape has no
// disjoint edge pair (single edges, stars, and the standalone depth-1 tree).
double shape_min_disjoint_distance(const TreeShape& shape, double root_slab = 1.0);

Index shape_edge_id(const TreeShape& shape, const EdgePath& path);
EdgePath shape_edge_from_id(const TreeShape& shape, Index id);

// x2 coordinate of the node at the child end of `path` (the root sits at 0).
double shape_node_x2(const TreeShape& shape, const EdgePath& path, double root_slab = 1.0);

// Canonicalizes s=0 points onto the parent edge (or the branch-0 trunk for the root).
TreePointRef shape_canonical(const TreeShape& shape, TreePointRef p);

bool same_point(const TreePointRef& a, const TreePointRef& b, double s_tol = 1e-12);

}  // namespace smallfiber

#endif
