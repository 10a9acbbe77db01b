#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smallfiber/sphere_map.hpp"

#include <cmath>
#include <random>

using namespace smallfiber;

namespace {

Vector vec3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}

double box_distance(const Vector& x, const Box& b) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = (x[i] < b.lo[i]) ? b.lo[i] - x[i] : (x[i] > b.hi[i] ? x[i] - b.hi[i] : 0.0);
        acc += d * d;
    }
    return std::sqrt(acc);
}

Tree explicit_assembly(int n, int r) {
    return glue_at_roots(std::vector<Tree>(2 * (n + 1), build_tree(n, r)));
}

}  // namespace

TEST_CASE("sphere_to_cube frozen directions") {
    const BoundaryPoint e1 = sphere_to_cube(vec3(1, 0, 0));
    CHECK(e1.face == 1);
    CHECK(e1.ambient.isApprox(vec3(1, 0.5, 0.5)));
    CHECK(e1.local.isApprox(Vector::Constant(2, 0.5)));

    const BoundaryPoint down = sphere_to_cube(vec3(0, 0, -2));  // radial, any positive scale
    CHECK(down.face == 4);
    CHECK(down.ambient.isApprox(vec3(0.5, 0.5, 0.0)));

    const BoundaryPoint edge = sphere_to_cube(vec3(1, -1, 0));
    CHECK(edge.face == 1);  // smallest maximizing axis wins the tie
    CHECK(edge.ambient.isApprox(vec3(1.0, 0.0, 0.5)));

    CHECK_THROWS(sphere_to_cube(Vector::Zero(3)));
    CHECK_THROWS(sphere_to_cube(Vector::Ones(1)));
}

TEST_CASE("radial round trips") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 200; ++trial) {
            Vector u(n + 1);
            for (int i = 0; i <= n; ++i) u[i] = g(gen);
            if (u.norm() < 1e-6) continue;
            u /= u.norm();
            const BoundaryPoint b = sphere_to_cube(u);
            CHECK(face_to_ambient(n, b.face, b.local).isApprox(b.ambient, 1e-14));
            CHECK(cube_to_sphere(b.ambient).isApprox(u, 1e-12));
            // Radial invariance and boundary membership.
            const BoundaryPoint b2 = sphere_to_cube(Vector(3.7 * u));
            CHECK(b2.face == b.face);
            CHECK(b2.ambient.isApprox(b.ambient, 1e-12));
            CHECK(b.ambient.minCoeff() >= -1e-15);
            CHECK(b.ambient.maxCoeff() <= 1.0 + 1e-15);
            const int axis = face_axis(b.face);
            CHECK(b.ambient[axis] == static_cast<double>(face_side(b.face)));
            // The boundary point and the input sit on the same ray.
            const Vector back = sphere_to_cube(cube_to_sphere(b.ambient)).ambient;
            CHECK(back.isApprox(b.ambient, 1e-12));
        }
    }
}

TEST_CASE("transversality margin") {
    Matrix aligned(1, 3);
    aligned << 0, 0, 1;  // collinear with e3, so the (i,3) pairs collapse
    CHECK(transversality_margin(aligned, 2) == doctest::Approx(0.0).epsilon(1e-12));

    Matrix diag(1, 3);
    diag << 1, 1, 1;
    const double m = transversality_margin(diag, 2);
    CHECK(m > 0.3);
    CHECK(m <= 1.0 + 1e-12);

    Matrix two(2, 4);
    two << 1.0, 0.5, -0.3, 0.2, 0.2, -1.0, 0.4, 0.7;
    const double m2 = transversality_margin(two, 3);
    CHECK(m2 > 1e-3);
    CHECK(m2 <= 1.0 + 1e-12);

    Matrix planar(2, 4);
    planar << 1, 1, 1, 1, 1, -1, 1, -1;  // rows sum into span{e0, e2}
    CHECK(transversality_margin(planar, 3) < 1e-12);
    CHECK_THROWS(transversality_margin(Matrix::Ones(2, 3), 2));  // q + 1 exceeds n + 1
}

TEST_CASE("projection build is deterministic and M bounds the cube") {
    Rng rng_a(42), rng_b(42);
    const ProjectionSpec a = build_projection(3, 2, rng_a);
    const ProjectionSpec b = build_projection(3, 2, rng_b);
    CHECK(a.v == b.v);
    CHECK(a.M == b.M);
    CHECK(transversality_margin(a.v, 3) > 1e-8);

    double brute = 0.0;
    for (int c = 0; c < 16; ++c) {
        Vector w(4);
        for (int i = 0; i < 4; ++i) w[i] = (c >> i) & 1;
        brute = std::max(brute, (a.v * w).norm());
    }
    CHECK(a.M == doctest::Approx(brute));

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vector x(4);
        for (int i = 0; i < 4; ++i) x[i] = u01(gen);
        CHECK((a.v * x).norm() <= a.M + 1e-12);
    }
}

TEST_CASE("collar budget choice") {
    CHECK(choose_parameters(3, 2, 0.1) == doctest::Approx(0.1 / 16.0));
    CHECK(choose_parameters(2, 2, 0.1) == doctest::Approx(0.1 / 12.0));
    CHECK_THROWS(choose_parameters(1, 2, 0.1));
    CHECK_THROWS(choose_parameters(3, 2, 0.0));
    CHECK_THROWS(choose_parameters(3, 2, 1.0));
}

TEST_CASE("map assembly with overrides") {
    const SmallFiberMap map = build_small_fiber_map(2, 2, 0.5, 7, 2, 0.2);
    CHECK(map.r == 2);
    CHECK(map.delta == 0.2);
    CHECK(map.shape.branches == 6);
    CHECK(map.shape.arity == 4);
    CHECK(map.shape.depth == 2);
    CHECK(map.d == doctest::Approx(1.0 / 96.0));
    CHECK(map.offset_scale() == doctest::Approx(1.0 / 384.0));
    CHECK(map.face_map.r == 2);
    CHECK(map.vmax.certified);
    CHECK(map.vmax.bound() > 0.0);

    // Depth selection is the smallest r that meets the epsilon budget.
    const SmallFiberMap chosen = build_small_fiber_map(3, 2, 0.1, 0);
    const double target = 0.1 / 8.0;
    CHECK(chosen.vmax.bound() * std::pow(2.0, -chosen.r) <= target);
    if (chosen.r > 0)
        CHECK(chosen.vmax.bound() * std::pow(2.0, -(chosen.r - 1)) > target);

    // n = q: finite fibers, no depth needed.
    const SmallFiberMap flat = build_small_fiber_map(2, 2, 0.1, 3);
    CHECK(flat.r == 0);
}

TEST_CASE("deterministic builds and json round trip") {
    const SmallFiberMap a = build_small_fiber_map(3, 2, 0.25, 11, 2);
    const SmallFiberMap b = build_small_fiber_map(3, 2, 0.25, 11, 2);
    CHECK(smallfiber_to_json(a).dump() == smallfiber_to_json(b).dump());

    const nlohmann::json j = smallfiber_to_json(a);
    CHECK(j.at("schema") == "smallfiber/1");
    const SmallFiberMap c = smallfiber_from_json(j);
    CHECK(smallfiber_to_json(c).dump() == j.dump());

    nlohmann::json bad = j;
    bad["schema"] = "smallfiber/2";
    CHECK_THROWS(smallfiber_from_json(bad));
}

TEST_CASE("implicit evaluation matches the explicit thickened embedding") {
    struct Case {
        int n, q, r;
        double eps, delta;
    };
    for (const Case cs : {Case{2, 2, 2, 0.5, 0.2}, Case{3, 3, 1, 0.5, 0.3}}) {
        const SmallFiberMap map =
            build_small_fiber_map(cs.n, cs.q, cs.eps, 99, cs.r, cs.delta);
        const Tree tree = explicit_assembly(cs.n, cs.r);
        LayoutParams layout;
        layout.M = map.proj.M;
        const EmbeddingSpec emb = embed_tree(tree, cs.q, layout);
        REQUIRE(emb.d == doctest::Approx(map.d).epsilon(1e-13));

        std::mt19937_64 gen(123);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            Vector u(cs.n + 1);
            for (int i = 0; i <= cs.n; ++i) u[i] = g(gen);
            if (u.norm() < 1e-6) continue;
            u /= u.norm();

            const BoundaryPoint bp = sphere_to_cube(u);
            TreePointRef ref = eval_tree_map(map.face_map, bp.local);
            ref.edge.branch = bp.face;
            const TreePoint pt{shape_edge_id(map.shape, ref.edge), ref.s};
            const Vector x = map.proj.v * bp.ambient;
            const Vector y_explicit = thicken_eval(tree, emb, pt, x);
            const Vector y = eval_f(map, u);
            CHECK((y - y_explicit).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("fiber search matches explicit inversion") {
    const SmallFiberMap map = build_small_fiber_map(2, 2, 0.5, 99, 2, 0.2);
    const Tree tree = explicit_assembly(2, 2);
    LayoutParams layout;
    layout.M = map.proj.M;
    const EmbeddingSpec emb = embed_tree(tree, 2, layout);

    std::mt19937_64 gen(321);
    std::normal_distribution<double> g(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300 && checked < 150; ++trial) {
        Vector u(3);
        for (int i = 0; i < 3; ++i) u[i] = g(gen);
        if (u.norm() < 1e-6) continue;
        u /= u.norm();
        const Vector y = eval_f(map, u);
        const auto comps = fiber_of_f(map, y);
        const auto pre = invert_thicken(tree, emb, y);
        REQUIRE(!comps.empty());
        CHECK(comps.size() <= 6);
        // Skip the measure-zero glue point where conventions differ by design.
        const bool at_root = comps[0].point.edge.level() == 0 && comps[0].point.s == 0.0;
        if (at_root) continue;
        ++checked;
        REQUIRE(comps.size() == pre.size());
        for (const FiberComponent& comp : comps) {
            const Index id = shape_edge_id(map.shape, comp.point.edge);
            bool matched = false;
            for (const auto& [p, x] : pre)
                if (p.edge == id && std::abs(p.s - comp.point.s) <= 1e-9 &&
                    (x - comp.offset).norm() <= 1e-6 * std::max(1.0, map.proj.M))
                    matched = true;
            CHECK(matched);
        }
        // The evaluated point itself appears among the components.
        const BoundaryPoint bp = sphere_to_cube(u);
        TreePointRef ref = eval_tree_map(map.face_map, bp.local);
        ref.edge.branch = bp.face;
        const TreePointRef canon = shape_canonical(map.shape, ref);
        bool found = false;
        for (const FiberComponent& comp : comps)
            if (comp.face == bp.face && comp.point.edge.digits == canon.edge.digits &&
                std::abs(comp.point.s - canon.s) <= 1e-9)
                found = true;
        CHECK(found);
    }
    CHECK(checked >= 100);
}

TEST_CASE("fiber components carry the evaluating point geometrically") {
    for (int q : {2, 3}) {
        const int n = 3;
        const SmallFiberMap map = build_small_fiber_map(n, q, 0.5, 5, 2, 0.25);
        std::mt19937_64 gen(777);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            Vector u(n + 1);
            for (int i = 0; i <= n; ++i) u[i] = g(gen);
            if (u.norm() < 1e-6) continue;
            u /= u.norm();
            const Vector y = eval_f(map, u);
            const auto comps = fiber_of_f(map, y);
            REQUIRE(!comps.empty());
            CHECK(comps.size() <= 9);  // max(2(n+1), 2^n + 1) for n = 3

            const BoundaryPoint bp = sphere_to_cube(u);
            bool found = false;
            for (const FiberComponent& comp : comps) {
                if (comp.face != bp.face) continue;
                const SlicedComponent sc = slice_component(map, comp);
                double nearest = kInf;
                for (const Box& box : sc.faces)
                    nearest = std::min(nearest, box_distance(bp.local, box));
                if (nearest > 1e-7) continue;
                const Vector resid = sc.system.normals * bp.local - sc.system.offsets;
                if (resid.cwiseAbs().maxCoeff() <= 1e-7) found = true;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("fiber measure is finite, nonnegative, and reproducible") {
    const SmallFiberMap map = build_small_fiber_map(3, 2, 0.5, 13, 1, 0.25);
    std::mt19937_64 gen(2718);
    std::normal_distribution<double> g(0.0, 1.0);
    double positive = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Vector u(4);
        for (int i = 0; i < 4; ++i) u[i] = g(gen);
        u /= u.norm();
        const Vector y = eval_f(map, u);
        const auto comps = fiber_of_f(map, y);
        Index degenerate = 0;
        const double m1 = fiber_measure(map, comps, &degenerate);
        const double m2 = fiber_measure(map, comps);
        CHECK(m1 == m2);
        CHECK(m1 >= 0.0);
        CHECK(std::isfinite(m1));
        CHECK(degenerate >= 0);
        if (m1 > 0.0) ++positive;
    }
    CHECK(positive >= 40);  // one dimensional fibers have positive length generically
}
