#include "smallfiber/sphere_map.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace smallfiber {

BoundaryPoint sphere_to_cube(const Vector& u) {
    const int n = static_cast<int>(u.size()) - 1;
    require(n >= 1, "sphere_to_cube: ambient dimension >= 2 required");
    const double maxabs = u.cwiseAbs().maxCoeff();
    require(maxabs > 1e-300, "sphere_to_cube: zero vector has no direction");
    int axis = 0;
    for (int i = 0; i <= n; ++i)
        if (std::abs(u[i]) == maxabs) {
            axis = i;
            break;
        }
    BoundaryPoint b;
    b.face = 2 * axis + (u[axis] > 0.0 ? 1 : 0);
    b.ambient = Vector(n + 1);
    for (int i = 0; i <= n; ++i) b.ambient[i] = 0.5 + 0.5 * u[i] / maxabs;
    b.ambient[axis] = static_cast<double>(face_side(b.face));
    b.local = ambient_to_face(b.face, b.ambient);
    return b;
}

Vector cube_to_sphere(const Vector& ambient) {
    Vector u = ambient.array() - 0.5;
    const double norm = u.norm();
    require(norm > 1e-12, "cube_to_sphere: the cube center has no direction");
    return u / norm;
}

Vector face_to_ambient(int n, int face, const Vector& local) {
    require(local.size() == n, "face_to_ambient: local point must have dimension n");
    require(face >= 0 && face < 2 * (n + 1), "face_to_ambient: face out of range");
    Vector x(n + 1);
    const int axis = face_axis(face);
    for (int i = 0, j = 0; i <= n; ++i) x[i] = (i == axis) ? face_side(face) : local[j++];
    return x;
}

Vector ambient_to_face(int face, const Vector& ambient) {
    const int n = static_cast<int>(ambient.size()) - 1;
    require(face >= 0 && face < 2 * (n + 1), "ambient_to_face: face out of range");
    Vector local(n);
    const int axis = face_axis(face);
    for (int i = 0, j = 0; i <= n; ++i)
        if (i != axis) local[j++] = ambient[i];
    return local;
}

double transversality_margin(const Matrix& v, int n) {
    const int k = static_cast<int>(v.rows());
    require(v.cols() == n + 1, "transversality_margin: v must have n + 1 columns");
    require(k >= 1 && k + 2 <= n + 1, "transversality_margin: need k + 2 <= n + 1 columns");
    Matrix cols(n + 1, k + 2);
    for (int r = 0; r < k; ++r) {
        const double norm = v.row(r).norm();
        require(norm > 0.0, "transversality_margin: zero projection row");
        cols.col(2 + r) = v.row(r).transpose() / norm;
    }
    double margin = kInf;
    for (int i = 0; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            cols.col(0) = Vector::Unit(n + 1, i);
            cols.col(1) = Vector::Unit(n + 1, j);
            Eigen::JacobiSVD<Matrix> svd(cols);
            margin = std::min(margin, svd.singularValues().minCoeff());
        }
    }
    return margin;
}

ProjectionSpec build_projection(int n, int q, Rng& rng) {
    require(q >= 2, "build_projection: q >= 2 required");
    require(n + 1 >= q + 1, "build_projection: n >= q required");
    require(n <= 16, "build_projection: n too large for vertex enumeration");
    ProjectionSpec spec;
    spec.v = Matrix(q - 1, n + 1);
    while (true) {
        for (int r = 0; r < q - 1; ++r)
            for (int c = 0; c <= n; ++c) spec.v(r, c) = rng.gaussian();
        if (transversality_margin(spec.v, n) > 1e-8) break;
        ++spec.resample_count;
    }
    double m = 0.0;
    const int corners = 1 << (n + 1);
    Vector w(n + 1);
    for (int c = 0; c < corners; ++c) {
        for (int i = 0; i <= n; ++i) w[i] = (c >> i) & 1;
        m = std::max(m, (spec.v * w).norm());
    }
    spec.M = m;
    return spec;
}

double choose_parameters(int n, int q, double epsilon) {
    require(n >= q && q >= 2, "choose_parameters: n >= q >= 2 required");
    require(epsilon > 0.0 && epsilon < 1.0, "choose_parameters: epsilon in (0,1) required");
    return epsilon / (4.0 * (n + 1));
}

SmallFiberMap build_small_fiber_map(int n, int q, double epsilon, std::uint64_t seed,
                                    std::optional<int> r_override,
                                    std::optional<double> delta_override,
                                    Index vmax_resolution) {
    SmallFiberMap map;
    map.n = n;
    map.q = q;
    map.epsilon = epsilon;
    map.seed = seed;
    map.delta = delta_override ? *delta_override : choose_parameters(n, q, epsilon);
    require(map.delta > 0.0 && map.delta < 1.0, "build_small_fiber_map: delta in (0,1)");

    Rng rng(seed);
    map.proj = build_projection(n, q, rng);

    // Certified (q = 2) or estimated (q > 2) section sup, maximized over the 2(n+1) faces.
    VmaxCertificate best;
    Index cardinality = 0;
    for (int face = 0; face < 2 * (n + 1); ++face) {
        Box fb;
        fb.lo = Vector::Zero(n + 1);
        fb.hi = Vector::Ones(n + 1);
        fb.lo[face_axis(face)] = face_side(face);
        fb.hi[face_axis(face)] = face_side(face);
        VmaxCertificate cert = max_cross_section_volume(fb, map.proj.v, vmax_resolution);
        cardinality = std::max(cardinality, cert.max_cardinality);
        if (face == 0 || cert.bound() > best.bound()) best = cert;
    }
    best.max_cardinality = cardinality;
    map.vmax = best;

    if (r_override) {
        require(*r_override >= 0, "build_small_fiber_map: r >= 0 required");
        map.r = *r_override;
    } else if (n == q || map.vmax.bound() <= 0.0) {
        map.r = 0;
    } else {
        const double target = epsilon / std::pow(2.0, n);
        int r = 0;
        while (map.vmax.bound() * std::pow(2.0, -static_cast<double>(r) * (n - q)) > target) {
            ++r;
            require(r <= 60, "build_small_fiber_map: depth budget exhausted");
        }
        map.r = r;
    }

    map.face_map = build_tree_map(n, map.r, map.delta);
    map.shape = TreeShape{2 * (n + 1), 1 << n, map.r};
    map.d = shape_min_disjoint_distance(map.shape);
    return map;
}

Vector shape_embed_point(const TreeShape& shape, const TreePointRef& p, double root_slab) {
    const int level = p.edge.level();
    require(level <= shape.depth, "shape_embed_point: point deeper than the shape");
    require(p.s >= -1e-12 && p.s <= 1.0 + 1e-12, "shape_embed_point: s outside [0,1]");
    const double s = std::clamp(p.s, 0.0, 1.0);
    const double x2c = shape_node_x2(shape, p.edge, root_slab);
    double x2p = 0.0;
    if (level > 0) {
        EdgePath prefix = p.edge;
        prefix.digits.pop_back();
        x2p = shape_node_x2(shape, prefix, root_slab);
    }
    Vector pos(2);
    pos[0] = level + s;
    pos[1] = x2p + s * (x2c - x2p);
    return pos;
}

Vector eval_f(const SmallFiberMap& map, const Vector& u) {
    require(u.size() == map.n + 1, "eval_f: u must have dimension n + 1");
    return eval_f_boundary(map, sphere_to_cube(u));
}

Vector eval_f_boundary(const SmallFiberMap& map, const BoundaryPoint& b) {
    require(b.local.size() == map.n && b.ambient.size() == map.n + 1,
            "eval_f_boundary: dimension mismatch");
    require(b.face >= 0 && b.face < 2 * (map.n + 1), "eval_f_boundary: face out of range");
    TreePointRef ref = eval_tree_map(map.face_map, b.local);
    ref.edge.branch = b.face;
    const Vector pos = shape_embed_point(map.shape, ref);
    const Vector offset = map.proj.v * b.ambient;
    Vector y(map.q);
    y[0] = pos[0];
    y.tail(map.q - 1) = (map.offset_scale() / map.proj.M) * offset;
    y[1] += pos[1];
    return y;
}

namespace {

// Canonical form that keeps the face: junctions fold onto the parent edge, but the glue
// point stays tagged with its own branch so every face contributes a component.
TreePointRef face_canonical(TreePointRef p) {
    p.s = std::clamp(p.s, 0.0, 1.0);
    if (p.s == 0.0 && p.edge.level() > 0) {
        p.edge.digits.pop_back();
        p.s = 1.0;
    }
    return p;
}

}  // namespace

std::vector<FiberComponent> fiber_of_f(const SmallFiberMap& map, const Vector& y, double tol) {
    require(y.size() == map.q, "fiber_of_f: y must have dimension q");
    std::vector<FiberComponent> out;
    const double os = map.offset_scale();
    const double budget = os * (1.0 + tol);

    double trans = 0.0;
    for (int j = 2; j < map.q; ++j) trans += y[j] * y[j];
    if (trans > budget * budget) return out;
    const double window = std::sqrt(budget * budget - trans);
    const double y1 = y[1];

    const int lmin = std::max(0, static_cast<int>(std::ceil(y[0] - 1.0 - tol)));
    const int lmax = std::min(map.shape.depth, static_cast<int>(std::floor(y[0] + tol)));

    auto emit = [&](const EdgePath& edge, int level) {
        const double t = std::clamp(y[0] - level, 0.0, 1.0);
        const double x2c = shape_node_x2(map.shape, edge);
        double x2p = 0.0;
        if (level > 0) {
            EdgePath prefix = edge;
            prefix.digits.pop_back();
            x2p = shape_node_x2(map.shape, prefix);
        }
        const double x2 = x2p + t * (x2c - x2p);
        Vector res(map.q - 1);
        res[0] = y1 - x2;
        for (int j = 2; j < map.q; ++j) res[j - 1] = y[j];
        if (res.norm() > budget) return;
        TreePointRef p;
        p.edge = edge;
        p.s = t;
        p = face_canonical(p);
        for (const FiberComponent& c : out)
            if (c.face == p.edge.branch && c.point.edge.digits == p.edge.digits &&
                std::abs(c.point.s - p.s) <= 1e-9)
                return;
        FiberComponent comp;
        comp.point = p;
        comp.offset = res * (map.proj.M / os);
        comp.face = p.edge.branch;
        TreePointRef in_face = p;
        in_face.edge.branch = 0;
        comp.desc = fiber_of(map.face_map, in_face);
        out.push_back(std::move(comp));
    };

    for (int level = lmin; level <= lmax; ++level) {
        for (int b = 0; b < map.shape.branches; ++b) {
            EdgePath path;
            path.branch = b;
            // Depth-first walk; subtrees whose slab misses the offset window are skipped.
            std::vector<EdgePath> stack{path};
            while (!stack.empty()) {
                EdgePath cur = stack.back();
                stack.pop_back();
                if (cur.level() == level) {
                    emit(cur, level);
                    continue;
                }
                const double center = shape_node_x2(map.shape, cur);
                const double half = 0.5 * shape_slab_width(map.shape, cur.level() + 1);
                const double gap = std::abs(y1 - std::clamp(y1, center - half, center + half));
                if (gap > window + 1e-12 * std::max(1.0, std::abs(y1))) continue;
                for (int j = map.shape.arity - 1; j >= 0; --j) {
                    EdgePath child = cur;
                    child.digits.push_back(j);
                    stack.push_back(child);
                }
            }
        }
    }
    return out;
}

SlicedComponent slice_component(const SmallFiberMap& map, const FiberComponent& comp) {
    SlicedComponent sc;
    sc.desc = comp.desc;
    sc.face = comp.face;
    sc.faces = fiber_faces(map.n, comp.desc);
    const int axis = face_axis(comp.face);
    const int side = face_side(comp.face);
    sc.system.normals = Matrix(map.q - 1, map.n);
    for (int i = 0, j = 0; i <= map.n; ++i)
        if (i != axis) sc.system.normals.col(j++) = map.proj.v.col(i);
    sc.system.offsets = comp.offset - side * map.proj.v.col(axis);
    return sc;
}

double fiber_measure(const SmallFiberMap& map, const std::vector<FiberComponent>& comps,
                     Index* degenerate_out) {
    double total = 0.0;
    Index degenerate = 0;
    for (const FiberComponent& comp : comps) {
        const SlicedComponent sc = slice_component(map, comp);
        Index bad = 0;
        total += sliced_boxes_volume(sc.faces, sc.system, &bad);
        degenerate += bad;
    }
    if (degenerate_out) *degenerate_out = degenerate;
    return total;
}

nlohmann::json smallfiber_to_json(const SmallFiberMap& map) {
    std::vector<std::vector<double>> v(map.proj.v.rows());
    for (Eigen::Index r = 0; r < map.proj.v.rows(); ++r) {
        v[r].resize(map.proj.v.cols());
        for (Eigen::Index c = 0; c < map.proj.v.cols(); ++c) v[r][c] = map.proj.v(r, c);
    }
    nlohmann::json j{{"schema", "smallfiber/1"},
                     {"n", map.n},
                     {"q", map.q},
                     {"epsilon", map.epsilon},
                     {"seed", map.seed},
                     {"r", map.r},
                     {"delta", map.delta},
                     {"v", v},
                     {"M", map.proj.M},
                     {"resample_count", map.proj.resample_count},
                     {"vmax",
                      {{"value", map.vmax.value},
                       {"padding", map.vmax.padding},
                       {"resolution", map.vmax.resolution},
                       {"certified", map.vmax.certified},
                       {"max_cardinality", map.vmax.max_cardinality}}},
                     {"tree",
                      {{"branches", map.shape.branches},
                       {"arity", map.shape.arity},
                       {"depth", map.shape.depth}}},
                     {"embedding",
                      {{"root_slab", 1.0}, {"offset_scale", map.offset_scale()}}}};
    j["d"] = std::isfinite(map.d) ? nlohmann::json(map.d) : nlohmann::json(nullptr);
    return j;
}

SmallFiberMap smallfiber_from_json(const nlohmann::json& j) {
    require(j.at("schema") == "smallfiber/1", "smallfiber_from_json: unknown schema");
    SmallFiberMap map;
    map.n = j.at("n").get<int>();
    map.q = j.at("q").get<int>();
    map.epsilon = j.at("epsilon").get<double>();
    map.seed = j.at("seed").get<std::uint64_t>();
    map.r = j.at("r").get<int>();
    map.delta = j.at("delta").get<double>();
    const auto& v = j.at("v");
    map.proj.v = Matrix(map.q - 1, map.n + 1);
    for (int r = 0; r < map.q - 1; ++r)
        for (int c = 0; c <= map.n; ++c) map.proj.v(r, c) = v.at(r).at(c).get<double>();
    map.proj.M = j.at("M").get<double>();
    map.proj.resample_count = j.at("resample_count").get<int>();
    const auto& vm = j.at("vmax");
    map.vmax.value = vm.at("value").get<double>();
    map.vmax.padding = vm.at("padding").get<double>();
    map.vmax.resolution = vm.at("resolution").get<Index>();
    map.vmax.certified = vm.at("certified").get<bool>();
    map.vmax.max_cardinality = vm.at("max_cardinality").get<Index>();
    map.face_map = build_tree_map(map.n, map.r, map.delta);
    map.shape = TreeShape{2 * (map.n + 1), 1 << map.n, map.r};
    map.d = shape_min_disjoint_distance(map.shape);
    return map;
}

}  // namespace smallfiber
