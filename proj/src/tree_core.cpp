#include "smallfiber/tree_core.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace smallfiber {

namespace {

void add_subtree(Tree& t, Index parent_node, int remaining, int branch) {
    const Index child = t.node_count();
    const Index edge_id = t.edge_count();
    Tree::Edge e;
    e.parent_node = parent_node;
    e.child_node = child;
    e.level = t.nodes[parent_node].depth;
    e.branch = branch;
    e.length = (remaining == 0) ? 0.5 : 1.0;
    t.edges.push_back(e);
    Tree::Node nd;
    nd.parent_edge = edge_id;
    nd.depth = t.nodes[parent_node].depth + 1;
    nd.branch = branch;
    t.nodes.push_back(nd);
    t.children.emplace_back();
    t.children[parent_node].push_back(edge_id);
    if (remaining > 0)
        for (int j = 0; j < t.arity; ++j) add_subtree(t, child, remaining - 1, branch);
}

}  // namespace

Tree build_tree(int n, int r) {
    require(n >= 1, "build_tree: n >= 1 required");
    require(r >= 0, "build_tree: r >= 0 required");
    require(n <= 20, "build_tree: n too large to materialize");
    Tree t;
    t.arity = 1 << n;
    const double total = std::pow(static_cast<double>(t.arity), r + 1);
    require(total < 4e6, "build_tree: tree too large to materialize");
    t.nodes.push_back(Tree::Node{});
    t.children.emplace_back();
    add_subtree(t, t.root, r, -1);
    return t;
}

Tree glue_at_roots(const std::vector<Tree>& trees) {
    require(!trees.empty(), "glue_at_roots: at least one tree required");
    Tree g;
    g.arity = 0;
    for (const Tree& t : trees) g.arity = std::max(g.arity, t.arity);
    g.nodes.push_back(Tree::Node{});
    g.children.emplace_back();
    for (int b = 0; b < static_cast<int>(trees.size()); ++b) {
        const Tree& t = trees[b];
        const Index node_off = g.node_count() - 1;  // input node i>0 -> node_off + i
        const Index edge_off = g.edge_count();
        for (Index e = 0; e < t.edge_count(); ++e) {
            Tree::Edge ne = t.edges[e];
            ne.parent_node = (ne.parent_node == t.root) ? g.root : node_off + ne.parent_node;
            ne.child_node = node_off + ne.child_node;
            ne.branch = b;
            g.edges.push_back(ne);
        }
        for (Index nid = 0; nid < t.node_count(); ++nid) {
            if (nid == t.root) continue;
            Tree::Node nn = t.nodes[nid];
            nn.parent_edge = edge_off + nn.parent_edge;
            nn.branch = b;
            g.nodes.push_back(nn);
            g.children.emplace_back();
        }
        for (Index nid = 0; nid < t.node_count(); ++nid) {
            const Index gn = (nid == t.root) ? g.root : node_off + nid;
            for (Index ce : t.children[nid]) g.children[gn].push_back(edge_off + ce);
        }
    }
    return g;
}

int max_degree(const Tree& tree) {
    int best = 0;
    for (Index v = 0; v < tree.node_count(); ++v) {
        int deg = static_cast<int>(tree.children[v].size());
        if (v != tree.root) deg += 1;
        best = std::max(best, deg);
    }
    return best;
}

EmbeddingSpec embed_tree(const Tree& tree, int q, const LayoutParams& layout) {
    require(q >= 2, "embed_tree: q >= 2 required");
    EmbeddingSpec emb;
    emb.q = q;
    emb.M = layout.M;
    emb.root_slab = layout.root_slab;
    emb.positions = Matrix::Zero(tree.node_count(), q);

    std::function<void(Index, double, double)> place = [&](Index node, double center, double width) {
        emb.positions(node, 0) = tree.nodes[node].depth;
        emb.positions(node, 1) = center;
        const auto& kids = tree.children[node];
        if (kids.empty()) return;
        const double w = width / static_cast<double>(kids.size());
        for (std::size_t j = 0; j < kids.size(); ++j) {
            const double c = center - 0.5 * width + (static_cast<double>(j) + 0.5) * w;
            place(tree.edges[kids[j]].child_node, c, w);
        }
    };
    place(tree.root, 0.0, layout.root_slab);
    emb.d = min_disjoint_edge_distance(tree, emb);
    return emb;
}

double segment_distance(const Vector& a0, const Vector& a1, const Vector& b0, const Vector& b1) {
    // Closest points of two segments via clamped quadratic minimization.
    const Vector d1 = a1 - a0, d2 = b1 - b0, r = a0 - b0;
    const double A = d1.squaredNorm(), E = d2.squaredNorm(), F = d2.dot(r);
    double s = 0.0, t = 0.0;
    const double tiny = 1e-30;
    if (A <= tiny && E <= tiny) return r.norm();
    if (A <= tiny) {
        t = std::clamp(F / E, 0.0, 1.0);
    } else {
        const double C = d1.dot(r);
        if (E <= tiny) {
            s = std::clamp(-C / A, 0.0, 1.0);
        } else {
            const double B = d1.dot(d2);
            const double den = A * E - B * B;
            s = (den > tiny) ? std::clamp((B * F - C * E) / den, 0.0, 1.0) : 0.0;
            t = (B * s + F) / E;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-C / A, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((B - C) / A, 0.0, 1.0);
            }
        }
    }
    return (a0 + s * d1 - (b0 + t * d2)).norm();
}

double min_disjoint_edge_distance(const Tree& tree, const EmbeddingSpec& emb) {
    double best = kInf;
    const Index E = tree.edge_count();
    for (Index i = 0; i < E; ++i) {
        const auto& ei = tree.edges[i];
        const Vector a0 = emb.positions.row(ei.parent_node);
        const Vector a1 = emb.positions.row(ei.child_node);
        for (Index j = i + 1; j < E; ++j) {
            const auto& ej = tree.edges[j];
            if (ei.parent_node == ej.parent_node || ei.parent_node == ej.child_node ||
                ei.child_node == ej.parent_node || ei.child_node == ej.child_node)
                continue;
            const Vector b0 = emb.positions.row(ej.parent_node);
            const Vector b1 = emb.positions.row(ej.child_node);
            best = std::min(best, segment_distance(a0, a1, b0, b1));
        }
    }
    return best;
}

TreePoint canonical_point(const Tree& tree, TreePoint p) {
    require(p.edge >= 0 && p.edge < tree.edge_count(), "canonical_point: edge out of range");
    require(p.s >= -1e-15 && p.s <= 1.0 + 1e-15, "canonical_point: s outside [0,1]");
    p.s = std::clamp(p.s, 0.0, 1.0);
    if (p.s == 0.0) {
        const Index parent = tree.edges[p.edge].parent_node;
        if (parent == tree.root) {
            p.edge = tree.children[tree.root][0];
        } else {
            p.edge = tree.nodes[parent].parent_edge;
            p.s = 1.0;
        }
    }
    return p;
}

Vector thicken_eval(const Tree& tree, const EmbeddingSpec& emb, TreePoint p, const Vector& x) {
    require(x.size() == emb.q - 1, "thicken_eval: offset dimension must be q-1");
    require(x.norm() <= emb.M * (1.0 + 1e-12), "thicken_eval: |x| <= M required");
    p = canonical_point(tree, p);
    const auto& e = tree.edges[p.edge];
    const Vector p0 = emb.positions.row(e.parent_node);
    const Vector p1 = emb.positions.row(e.child_node);
    Vector y = p0 + p.s * (p1 - p0);
    y.tail(emb.q - 1) += emb.offset_scale() * (x / emb.M);
    return y;
}

std::vector<std::pair<TreePoint, Vector>> invert_thicken(const Tree& tree,
                                                         const EmbeddingSpec& emb,
                                                         const Vector& y, double tol) {
    require(y.size() == emb.q, "invert_thicken: y must have dimension q");
    std::vector<std::pair<TreePoint, Vector>> out;
    const double scale = emb.offset_scale();
    for (Index e = 0; e < tree.edge_count(); ++e) {
        const auto& ed = tree.edges[e];
        const double x1p = emb.positions(ed.parent_node, 0);
        const double x1c = emb.positions(ed.child_node, 0);
        const double t = (y[0] - x1p) / (x1c - x1p);
        if (t < -tol || t > 1.0 + tol) continue;
        const double tc = std::clamp(t, 0.0, 1.0);
        const Vector p0 = emb.positions.row(ed.parent_node);
        const Vector p1 = emb.positions.row(ed.child_node);
        const Vector base = p0 + tc * (p1 - p0);
        const Vector resid = y.tail(emb.q - 1) - base.tail(emb.q - 1);
        const Vector x = resid * (emb.M / scale);
        if (x.norm() > emb.M * (1.0 + tol)) continue;
        TreePoint p = canonical_point(tree, TreePoint{e, tc});
        bool dup = false;
        for (const auto& [pp, xx] : out)
            if (pp.edge == p.edge && std::abs(pp.s - p.s) < 1e-9) dup = true;
        if (!dup) out.emplace_back(p, x);
    }
    return out;
}

namespace {

double dist_to_root_node(const Tree& tree, Index node) {
    double acc = 0.0;
    while (node != tree.root) {
        const auto& e = tree.edges[tree.nodes[node].parent_edge];
        acc += e.length;
        node = e.parent_node;
    }
    return acc;
}

bool is_ancestor_or_eq(const Tree& tree, Index a, Index b) {
    while (true) {
        if (a == b) return true;
        if (b == tree.root) return false;
        b = tree.edges[tree.nodes[b].parent_edge].parent_node;
    }
}

}  // namespace

double tree_distance(const Tree& tree, TreePoint a, TreePoint b) {
    a = canonical_point(tree, a);
    b = canonical_point(tree, b);
    const auto& ea = tree.edges[a.edge];
    const auto& eb = tree.edges[b.edge];
    if (a.edge == b.edge) return std::abs(a.s - b.s) * ea.length;
    const double da = a.s * ea.length;  // below ea.parent_node
    const double db = b.s * eb.length;
    if (is_ancestor_or_eq(tree, ea.child_node, eb.parent_node))
        return (ea.length - da) + dist_to_root_node(tree, eb.parent_node) -
               dist_to_root_node(tree, ea.child_node) + db;
    if (is_ancestor_or_eq(tree, eb.child_node, ea.parent_node))
        return (eb.length - db) + dist_to_root_node(tree, ea.parent_node) -
               dist_to_root_node(tree, eb.child_node) + da;
    Index u = ea.parent_node, v = eb.parent_node;
    auto depth = [&](Index nd) { return tree.nodes[nd].depth; };
    Index x = u, yv = v;
    while (depth(x) > depth(yv)) x = tree.edges[tree.nodes[x].parent_edge].parent_node;
    while (depth(yv) > depth(x)) yv = tree.edges[tree.nodes[yv].parent_edge].parent_node;
    while (x != yv) {
        x = tree.edges[tree.nodes[x].parent_edge].parent_node;
        yv = tree.edges[tree.nodes[yv].parent_edge].parent_node;
    }
    const double dl = dist_to_root_node(tree, x);
    return (dist_to_root_node(tree, u) - dl + da) + (dist_to_root_node(tree, v) - dl + db);
}

nlohmann::json tree_to_json(const Tree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (Index i = 0; i < tree.node_count(); ++i) {
        const auto& n = tree.nodes[i];
        nodes.push_back({{"id", i},
                         {"parent", n.parent_edge < 0 ? nlohmann::json(nullptr)
                                                      : nlohmann::json(tree.edges[n.parent_edge].parent_node)},
                         {"depth", n.depth}});
    }
    nlohmann::json edges = nlohmann::json::array();
    nlohmann::json provenance = nlohmann::json::array();
    for (Index i = 0; i < tree.edge_count(); ++i) {
        const auto& e = tree.edges[i];
        edges.push_back({{"id", i},
                         {"parent_node", e.parent_node},
                         {"child_node", e.child_node},
                         {"level", e.level},
                         {"length", e.length}});
        provenance.push_back(e.branch);
    }
    return {{"schema", "tree/1"},
            {"root", tree.root},
            {"arity", tree.arity},
            {"nodes", nodes},
            {"edges", edges},
            {"provenance", provenance}};
}

Tree tree_from_json(const nlohmann::json& j) {
    require(j.at("schema") == "tree/1", "tree_from_json: unknown schema");
    Tree t;
    t.root = j.at("root").get<Index>();
    t.arity = j.at("arity").get<int>();
    const auto& nodes = j.at("nodes");
    const auto& edges = j.at("edges");
    const auto& prov = j.at("provenance");
    t.nodes.resize(nodes.size());
    t.children.assign(nodes.size(), {});
    for (const auto& nj : nodes) {
        const Index id = nj.at("id").get<Index>();
        t.nodes[id].depth = nj.at("depth").get<int>();
    }
    t.edges.resize(edges.size());
    for (const auto& ej : edges) {
        const Index id = ej.at("id").get<Index>();
        Tree::Edge e;
        e.parent_node = ej.at("parent_node").get<Index>();
        e.child_node = ej.at("child_node").get<Index>();
        e.level = ej.at("level").get<int>();
        e.length = ej.at("length").get<double>();
        e.branch = prov.at(id).get<int>();
        t.edges[id] = e;
        t.nodes[e.child_node].parent_edge = id;
        t.nodes[e.child_node].branch = e.branch;
    }
    for (Index e = 0; e < t.edge_count(); ++e) t.children[t.edges[e].parent_node].push_back(e);
    for (auto& kids : t.children) std::sort(kids.begin(), kids.end());
    return t;
}

// ---------------------------------------------------------------------------- implicit form

Index shape_subtree_edges(int arity, int depth) {
    require(arity >= 2, "shape_subtree_edges: arity >= 2 required");
    Index total = 0, pow = 1;
    for (int i = 0; i <= depth; ++i) {
        total += pow;
        pow *= arity;
    }
    return total;
}

Index shape_edge_count(const TreeShape& shape) {
    return shape.branches * shape_subtree_edges(shape.arity, shape.depth);
}

Index shape_node_count(const TreeShape& shape) { return shape_edge_count(shape) + 1; }

double shape_slab_width(const TreeShape& shape, int k, double root_slab) {
    require(k >= 0, "shape_slab_width: k >= 0 required");
    if (k == 0) return root_slab;
    double w = root_slab / shape.branches;
    for (int i = 1; i < k; ++i) w /= shape.arity;
    return w;
}

double shape_min_disjoint_distance(const TreeShape& shape, double root_slab) {
    const bool has_pair = (shape.branches >= 2 && shape.depth >= 1) ||
                          (shape.branches == 1 && shape.depth >= 2);
    if (!has_pair) return kInf;
    return shape_slab_width(shape, shape.depth + 1, root_slab);
}

Index shape_edge_id(const TreeShape& shape, const EdgePath& path) {
    require(path.branch >= 0 && path.branch < shape.branches, "shape_edge_id: branch out of range");
    require(path.level() <= shape.depth, "shape_edge_id: path deeper than shape");
    Index id = path.branch * shape_subtree_edges(shape.arity, shape.depth);
    int remaining = shape.depth;
    for (int j : path.digits) {
        require(j >= 0 && j < shape.arity, "shape_edge_id: digit out of range");
        id += 1 + j * shape_subtree_edges(shape.arity, remaining - 1);
        --remaining;
    }
    return id;
}

EdgePath shape_edge_from_id(const TreeShape& shape, Index id) {
    const Index per_branch = shape_subtree_edges(shape.arity, shape.depth);
    require(id >= 0 && id < shape.branches * per_branch, "shape_edge_from_id: id out of range");
    EdgePath path;
    path.branch = static_cast<int>(id / per_branch);
    Index rest = id % per_branch;
    int remaining = shape.depth;
    while (rest != 0) {
        rest -= 1;
        const Index sub = shape_subtree_edges(shape.arity, remaining - 1);
        const int j = static_cast<int>(rest / sub);
        path.digits.push_back(j);
        rest -= static_cast<Index>(j) * sub;
        --remaining;
    }
    return path;
}

double shape_node_x2(const TreeShape& shape, const EdgePath& path, double root_slab) {
    double center = 0.0;
    double w = root_slab;
    center += w * ((2.0 * path.branch + 1.0) / (2.0 * shape.branches) - 0.5);
    w /= shape.branches;
    for (int j : path.digits) {
        center += w * ((2.0 * j + 1.0) / (2.0 * shape.arity) - 0.5);
        w /= shape.arity;
    }
    return center;
}

TreePointRef shape_canonical(const TreeShape& shape, TreePointRef p) {
    require(p.s >= -1e-15 && p.s <= 1.0 + 1e-15, "shape_canonical: s outside [0,1]");
    p.s = std::clamp(p.s, 0.0, 1.0);
    if (p.s == 0.0) {
        if (p.edge.level() == 0) {
            p.edge.branch = 0;
        } else {
            p.edge.digits.pop_back();
            p.s = 1.0;
        }
    }
    (void)shape;
    return p;
}

bool same_point(const TreePointRef& a, const TreePointRef& b, double s_tol) {
    return a.edge.branch == b.edge.branch && a.edge.digits == b.edge.digits &&
           std::abs(a.s - b.s) <= s_tol;
}

}  // namespace smallfiber
