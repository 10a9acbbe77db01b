#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smallfiber/tree_core.hpp"

#include <cmath>
#include <random>

using namespace smallfiber;

namespace {

// Independent edge-count oracle: sum_{k=0}^{r} arity^k, accumulated term by term.
Index edge_count_oracle(int arity, int r) {
    Index total = 0, pw = 1;
    for (int k = 0; k <= r; ++k) {
        total += pw;
        pw *= arity;
    }
    return total;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// Dense parameter-grid oracle for the distance between two segments.
double segment_distance_grid(const Vector& a0, const Vector& a1, const Vector& b0,
                             const Vector& b1, int grid = 200) {
    double best = kInf;
    for (int i = 0; i <= grid; ++i) {
        const double s = static_cast<double>(i) / grid;
        const Vector pa = a0 + s * (a1 - a0);
        for (int j = 0; j <= grid; ++j) {
            const double t = static_cast<double>(j) / grid;
            best = std::min(best, (pa - (b0 + t * (b1 - b0))).norm());
        }
    }
    return best;
}

Tree glued_standard(int n, int r) {
    std::vector<Tree> parts(2 * (n + 1), build_tree(n, r));
    return glue_at_roots(parts);
}

}  // namespace

TEST_CASE("build_tree sizes match the recursion") {
    CHECK(build_tree(2, 0).edge_count() == 1);
    CHECK(build_tree(2, 1).edge_count() == 5);
    CHECK(build_tree(2, 2).edge_count() == 21);
    CHECK(build_tree(2, 3).edge_count() == 85);
    CHECK(build_tree(3, 2).edge_count() == 73);
    CHECK(build_tree(1, 3).edge_count() == 15);
    for (int n = 1; n <= 3; ++n)
        for (int r = 0; r <= 3; ++r) {
            const Tree t = build_tree(n, r);
            CHECK(t.edge_count() == edge_count_oracle(1 << n, r));
            CHECK(t.node_count() == t.edge_count() + 1);
            Index leaves = 0;
            for (Index e = 0; e < t.edge_count(); ++e)
                if (t.is_leaf_edge(e)) {
                    ++leaves;
                    CHECK(t.edges[e].length == 0.5);
                    CHECK(t.edges[e].level == r);
                } else {
                    CHECK(t.edges[e].length == 1.0);
                }
            CHECK(leaves == static_cast<Index>(std::llround(std::pow(2.0, n * r))));
        }
    CHECK_THROWS(build_tree(0, 1));
    CHECK_THROWS(build_tree(2, -1));
    CHECK_THROWS(build_tree(4, 6));  // too large to materialize
}

TEST_CASE("edge levels equal the depth of their parent node") {
    const Tree t = build_tree(2, 2);
    for (Index e = 0; e < t.edge_count(); ++e)
        CHECK(t.edges[e].level == t.nodes[t.edges[e].parent_node].depth);
}

TEST_CASE("max_degree") {
    CHECK(max_degree(build_tree(2, 0)) == 1);
    CHECK(max_degree(build_tree(2, 1)) == 5);
    CHECK(max_degree(build_tree(2, 2)) == 5);
    CHECK(max_degree(build_tree(3, 1)) == 9);
    CHECK(max_degree(build_tree(3, 2)) == 9);
    CHECK(max_degree(glued_standard(2, 2)) == 6);  // root degree 2(n+1)
    CHECK(max_degree(glued_standard(3, 1)) == 9);  // junction degree 2^n + 1 dominates
}

TEST_CASE("glue_at_roots concatenates branches in order") {
    const int n = 2, r = 2;
    const Tree part = build_tree(n, r);
    const Tree g = glued_standard(n, r);
    const Index per = part.edge_count();
    CHECK(g.edge_count() == 6 * per);
    CHECK(g.node_count() == 6 * per + 1);
    CHECK(g.children[g.root].size() == 6);
    for (Index e = 0; e < g.edge_count(); ++e) {
        CHECK(g.edges[e].branch == static_cast<int>(e / per));
        CHECK(g.edges[e].level == part.edges[e % per].level);
        CHECK(g.edges[e].length == part.edges[e % per].length);
        CHECK(g.nodes[g.edges[e].child_node].branch == g.edges[e].branch);
    }
    // Within-branch structure is preserved relative to the branch trunk.
    for (Index e = 0; e < per; ++e) {
        const auto& ge = g.edges[per + e];  // branch 1
        const auto& pe = part.edges[e];
        if (pe.parent_node == part.root)
            CHECK(ge.parent_node == g.root);
        else
            CHECK(ge.parent_node == per + pe.parent_node);
    }
}

TEST_CASE("segment_distance against grid oracle and frozen cases") {
    CHECK(segment_distance(vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)) == doctest::Approx(1.0));
    CHECK(segment_distance(vec2(0, 0), vec2(1, 1), vec2(0, 1), vec2(1, 0)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(segment_distance(vec2(0.5, 2), vec2(0.5, 2), vec2(0, 0), vec2(1, 0)) ==
          doctest::Approx(2.0));
    Vector a0(3), a1(3), b0(3), b1(3);
    a0 << 0, 0, 0;
    a1 << 1, 0, 0;
    b0 << 0, 1, 1;
    b1 << 1, 1, 1;
    CHECK(segment_distance(a0, a1, b0, b1) == doctest::Approx(std::sqrt(2.0)));

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        Vector p0(2), p1(2), q0(2), q1(2);
        for (auto* v : {&p0, &p1, &q0, &q1})
            for (int i = 0; i < 2; ++i) (*v)[i] = u(rng);
        const double exact = segment_distance(p0, p1, q0, q1);
        const double grid = segment_distance_grid(p0, p1, q0, q1);
        CHECK(exact <= grid + 1e-12);      // exact minimum cannot exceed any sampled value
        CHECK(grid <= exact + 2.5e-2);     // grid pitch bounds the oracle gap
    }
}

TEST_CASE("layered embedding geometry") {
    const Tree t = glued_standard(2, 2);
    const EmbeddingSpec emb = embed_tree(t, 2);
    REQUIRE(emb.positions.rows() == t.node_count());
    REQUIRE(emb.positions.cols() == 2);
    CHECK(emb.positions(t.root, 0) == 0.0);
    CHECK(emb.positions(t.root, 1) == 0.0);
    for (Index v = 0; v < t.node_count(); ++v)
        CHECK(emb.positions(v, 0) == doctest::Approx(t.nodes[v].depth));
    // Daughters sit strictly inside the parent slab and in construction order.
    for (Index v = 0; v < t.node_count(); ++v) {
        const auto& kids = t.children[v];
        for (std::size_t j = 1; j < kids.size(); ++j)
            CHECK(emb.positions(t.edges[kids[j - 1]].child_node, 1) <
                  emb.positions(t.edges[kids[j]].child_node, 1));
    }
    // q > 2 pads trailing coordinates with zeros.
    const EmbeddingSpec emb3 = embed_tree(t, 3);
    for (Index v = 0; v < t.node_count(); ++v) CHECK(emb3.positions(v, 2) == 0.0);
    CHECK(emb3.d == doctest::Approx(emb.d));
}

TEST_CASE("closed-form layout matches the explicit embedding") {
    struct Case {
        int n, r, branches;
    };
    for (const Case c : {Case{2, 2, 1}, Case{2, 2, 6}, Case{1, 3, 1}, Case{1, 3, 4},
                         Case{3, 1, 8}, Case{2, 1, 6}}) {
        const Tree t = c.branches == 1
                           ? build_tree(c.n, c.r)
                           : glue_at_roots(std::vector<Tree>(c.branches, build_tree(c.n, c.r)));
        const TreeShape shape{c.branches, 1 << c.n, c.r};
        REQUIRE(t.edge_count() == shape_edge_count(shape));
        REQUIRE(t.node_count() == shape_node_count(shape));
        const EmbeddingSpec emb = embed_tree(t, 2);
        for (Index e = 0; e < t.edge_count(); ++e) {
            const EdgePath path = shape_edge_from_id(shape, e);
            CHECK(shape_edge_id(shape, path) == e);
            CHECK(path.level() == t.edges[e].level);
            const Index child = t.edges[e].child_node;
            CHECK(emb.positions(child, 0) == doctest::Approx(path.level() + 1));
            CHECK(emb.positions(child, 1) ==
                  doctest::Approx(shape_node_x2(shape, path)).epsilon(1e-13));
        }
        const double dc = shape_min_disjoint_distance(shape);
        if (std::isfinite(dc))
            CHECK(emb.d == doctest::Approx(dc).epsilon(1e-13));
        else
            CHECK(!std::isfinite(emb.d));
    }
}

TEST_CASE("disjoint edge distance frozen values and degenerate shapes") {
    CHECK(shape_min_disjoint_distance(TreeShape{6, 4, 2}) == doctest::Approx(1.0 / 96.0));
    CHECK(shape_min_disjoint_distance(TreeShape{1, 4, 2}) == doctest::Approx(1.0 / 16.0));
    CHECK(!std::isfinite(shape_min_disjoint_distance(TreeShape{1, 4, 0})));  // single edge
    CHECK(!std::isfinite(shape_min_disjoint_distance(TreeShape{6, 4, 0})));  // star
    CHECK(!std::isfinite(shape_min_disjoint_distance(TreeShape{1, 4, 1})));  // one junction
    CHECK(std::isfinite(shape_min_disjoint_distance(TreeShape{2, 4, 1})));

    const Tree star = glue_at_roots(std::vector<Tree>(6, build_tree(2, 0)));
    CHECK(!std::isfinite(embed_tree(star, 2).d));
    CHECK(embed_tree(star, 2).offset_scale() == doctest::Approx(0.25));
    const Tree assembly = glued_standard(2, 2);
    CHECK(embed_tree(assembly, 2).offset_scale() == doctest::Approx(1.0 / 384.0));
}

TEST_CASE("slab widths") {
    const TreeShape shape{6, 4, 2};
    CHECK(shape_slab_width(shape, 0) == doctest::Approx(1.0));
    CHECK(shape_slab_width(shape, 1) == doctest::Approx(1.0 / 6.0));
    CHECK(shape_slab_width(shape, 2) == doctest::Approx(1.0 / 24.0));
    CHECK(shape_slab_width(shape, 3) == doctest::Approx(1.0 / 96.0));
    CHECK(shape_slab_width(shape, 2, 3.0) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("canonical_point folds junctions onto parent edges") {
    const Tree t = build_tree(2, 1);  // edge 0 trunk, edges 1..4 leaves
    const TreePoint mid = canonical_point(t, TreePoint{1, 0.0});
    CHECK(mid.edge == 0);
    CHECK(mid.s == 1.0);
    const TreePoint root = canonical_point(t, TreePoint{0, 0.0});
    CHECK(root.edge == 0);
    CHECK(root.s == 0.0);
    const TreePoint inner = canonical_point(t, TreePoint{3, 0.25});
    CHECK(inner.edge == 3);
    CHECK(inner.s == 0.25);
    CHECK_THROWS(canonical_point(t, TreePoint{99, 0.5}));
    CHECK_THROWS(canonical_point(t, TreePoint{0, 1.5}));
}

TEST_CASE("shape_canonical mirrors canonical_point") {
    const TreeShape shape{6, 4, 2};
    TreePointRef p;
    p.edge.branch = 3;
    p.edge.digits = {2, 1};
    p.s = 0.0;
    const TreePointRef c = shape_canonical(shape, p);
    CHECK(c.edge.branch == 3);
    CHECK(c.edge.digits == std::vector<int>{2});
    CHECK(c.s == 1.0);
    TreePointRef trunk;
    trunk.edge.branch = 4;
    trunk.s = 0.0;
    const TreePointRef root = shape_canonical(shape, trunk);
    CHECK(root.edge.branch == 0);  // the glue point is shared by every branch
    CHECK(root.edge.digits.empty());
    CHECK(root.s == 0.0);
}

TEST_CASE("tree_distance hand-checked values") {
    const Tree t = build_tree(1, 1);  // edges: 0 trunk (len 1), 1 and 2 leaves (len 1/2)
    CHECK(tree_distance(t, TreePoint{1, 0.3}, TreePoint{2, 0.4}) == doctest::Approx(0.35));
    CHECK(tree_distance(t, TreePoint{0, 0.25}, TreePoint{1, 0.5}) == doctest::Approx(1.0));
    CHECK(tree_distance(t, TreePoint{0, 0.0}, TreePoint{1, 1.0}) == doctest::Approx(1.5));
    CHECK(tree_distance(t, TreePoint{1, 1.0}, TreePoint{2, 1.0}) == doctest::Approx(1.0));
    CHECK(tree_distance(t, TreePoint{1, 0.0}, TreePoint{0, 1.0}) == doctest::Approx(0.0));

    const Tree g = glue_at_roots({build_tree(1, 0), build_tree(1, 0)});
    CHECK(tree_distance(g, TreePoint{0, 1.0}, TreePoint{1, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("tree_distance is a metric on random triples") {
    const Tree t = glued_standard(2, 1);
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<Index> pick_edge(0, t.edge_count() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const TreePoint a{pick_edge(rng), u(rng)};
        const TreePoint b{pick_edge(rng), u(rng)};
        const TreePoint c{pick_edge(rng), u(rng)};
        const double ab = tree_distance(t, a, b);
        const double ba = tree_distance(t, b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(tree_distance(t, a, a) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(ab <= tree_distance(t, a, c) + tree_distance(t, c, b) + 1e-12);
    }
}

TEST_CASE("thicken_eval and invert_thicken round trip") {
    for (int q : {2, 3}) {
        const Tree t = glued_standard(2, 2);
        const EmbeddingSpec emb = embed_tree(t, q);
        REQUIRE(std::isfinite(emb.d));
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<Index> pick_edge(0, t.edge_count() - 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            TreePoint p{pick_edge(rng), u(rng)};
            Vector x(q - 1);
            for (int i = 0; i < q - 1; ++i) x[i] = 2.0 * u(rng) - 1.0;
            if (x.norm() > 1.0) x /= x.norm() * (1.0 + u(rng));
            x *= emb.M;
            const Vector y = thicken_eval(t, emb, p, x);
            const auto pre = invert_thicken(t, emb, y);
            REQUIRE(!pre.empty());
            CHECK(pre.size() <= 6);  // max(2(n+1), 2^n + 1) for n = 2
            const TreePoint pc = canonical_point(t, p);
            bool found = false;
            for (const auto& [pp, xx] : pre) {
                CHECK(thicken_eval(t, emb, pp, xx).isApprox(y, 1e-9));
                if (pp.edge == pc.edge && std::abs(pp.s - pc.s) < 1e-9 &&
                    (xx - x).norm() < 1e-6 * emb.M)
                    found = true;
            }
            CHECK(found);
        }
        // Points outside the thickened image have no preimage.
        Vector far(q);
        far.setZero();
        far[0] = -1.0;
        CHECK(invert_thicken(t, emb, far).empty());
        Vector off(q);
        off.setZero();
        off[0] = 0.5;
        off[1] = 10.0;
        CHECK(invert_thicken(t, emb, off).empty());
    }
}

TEST_CASE("thicken_eval validates the offset budget") {
    const Tree t = build_tree(2, 1);
    const EmbeddingSpec emb = embed_tree(t, 2);
    Vector x(1);
    x[0] = 2.0 * emb.M;
    CHECK_THROWS(thicken_eval(t, emb, TreePoint{0, 0.5}, x));
    Vector bad(2);
    bad.setZero();
    CHECK_THROWS(thicken_eval(t, emb, TreePoint{0, 0.5}, bad));
}

TEST_CASE("shape edge ids are a DFS bijection") {
    for (const TreeShape shape : {TreeShape{1, 4, 2}, TreeShape{6, 4, 2}, TreeShape{1, 2, 3},
                                  TreeShape{4, 2, 3}, TreeShape{8, 8, 2}}) {
        const Index total = shape_edge_count(shape);
        Index prev_branch = -1;
        for (Index id = 0; id < total; ++id) {
            const EdgePath path = shape_edge_from_id(shape, id);
            CHECK(shape_edge_id(shape, path) == id);
            CHECK(path.branch >= prev_branch);  // branch-major ordering
            prev_branch = path.branch;
            for (int d : path.digits) {
                CHECK(d >= 0);
                CHECK(d < shape.arity);
            }
            CHECK(path.level() <= shape.depth);
        }
        CHECK_THROWS(shape_edge_from_id(shape, total));
        CHECK_THROWS(shape_edge_from_id(shape, -1));
    }
}

TEST_CASE("implicit counts match explicit trees at scale") {
    // The audit-scale assembly: counts stay exact in 64-bit arithmetic.
    const TreeShape big{8, 8, 9};
    CHECK(shape_edge_count(big) == 8 * edge_count_oracle(8, 9));
    CHECK(shape_edge_count(big) == 1227133512);
    CHECK(shape_min_disjoint_distance(big) ==
          doctest::Approx(1.0 / (8.0 * std::pow(8.0, 9))).epsilon(1e-13));
}

TEST_CASE("tree json round trip") {
    const Tree t = glued_standard(2, 1);
    const nlohmann::json j = tree_to_json(t);
    CHECK(j.at("schema") == "tree/1");
    CHECK(j.at("nodes").size() == static_cast<std::size_t>(t.node_count()));
    CHECK(j.at("edges").size() == static_cast<std::size_t>(t.edge_count()));
    const Tree u = tree_from_json(j);
    REQUIRE(u.node_count() == t.node_count());
    REQUIRE(u.edge_count() == t.edge_count());
    CHECK(u.root == t.root);
    CHECK(u.arity == t.arity);
    for (Index e = 0; e < t.edge_count(); ++e) {
        CHECK(u.edges[e].parent_node == t.edges[e].parent_node);
        CHECK(u.edges[e].child_node == t.edges[e].child_node);
        CHECK(u.edges[e].level == t.edges[e].level);
        CHECK(u.edges[e].branch == t.edges[e].branch);
        CHECK(u.edges[e].length == t.edges[e].length);
    }
    for (Index v = 0; v < t.node_count(); ++v) {
        CHECK(u.nodes[v].parent_edge == t.nodes[v].parent_edge);
        CHECK(u.nodes[v].depth == t.nodes[v].depth);
        CHECK(u.children[v] == t.children[v]);
    }
    // Round trip is stable under re-embedding.
    const EmbeddingSpec e1 = embed_tree(t, 2);
    const EmbeddingSpec e2 = embed_tree(u, 2);
    CHECK((e1.positions - e2.positions).cwiseAbs().maxCoeff() == 0.0);
}
