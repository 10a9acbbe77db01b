#include "smallfiber/tree_map.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace smallfiber {

int Box::dim() const {
    int d = 0;
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (hi[i] > lo[i]) ++d;
    return d;
}

TreeMapSpec build_tree_map(int n, int r, double delta) {
    require(n >= 1, "build_tree_map: n >= 1 required");
    require(r >= 0, "build_tree_map: r >= 0 required");
    require(delta > 0.0 && delta < 1.0, "build_tree_map: delta in (0,1) required");
    TreeMapSpec spec;
    spec.n = n;
    spec.r = r;
    spec.delta = delta;
    double budget = delta;
    double scale = 1.0;
    for (int k = 0; k <= r; ++k) {
        spec.delta_level.push_back(budget);
        spec.scale.push_back(scale);
        if (k < r) {
            const double d1 = budget / (4.0 * n);
            require(d1 < 0.5, "build_tree_map: collar exceeds half the cube side");
            spec.collar.push_back(d1);
            scale *= 0.5 - d1;
            budget *= 0.5;
        }
    }
    return spec;
}

namespace {

double boundary_distance(const Vector& y) {
    double d = kInf;
    for (Eigen::Index i = 0; i < y.size(); ++i) d = std::min(d, std::min(y[i], 1.0 - y[i]));
    return d;
}

}  // namespace

TreePointRef eval_tree_map(const TreeMapSpec& spec, const Vector& x, WallTieBreak tie) {
    require(x.size() == spec.n, "eval_tree_map: x must have dimension n");
    for (int i = 0; i < spec.n; ++i)
        require(x[i] >= -1e-12 && x[i] <= 1.0 + 1e-12, "eval_tree_map: x outside the unit cube");
    Vector y = x.cwiseMax(0.0).cwiseMin(1.0);

    TreePointRef p;
    p.edge.branch = 0;
    for (int level = 0;; ++level) {
        const double dist = boundary_distance(y);
        if (level == spec.r) {
            p.s = std::clamp(2.0 * dist, 0.0, 1.0);
            return shape_canonical(spec.shape(), p);
        }
        const double d1 = spec.collar[level];
        if (dist <= d1) {
            p.s = std::clamp(dist / d1, 0.0, 1.0);
            return shape_canonical(spec.shape(), p);
        }
        const double h = 0.5 - d1;
        int digit = 0;
        for (int i = 0; i < spec.n; ++i) {
            const bool high = (tie == WallTieBreak::Low) ? (y[i] > 0.5) : (y[i] >= 0.5);
            if (high) digit |= 1 << i;
            y[i] = (y[i] - (high ? 0.5 : d1)) / h;
        }
        p.edge.digits.push_back(digit);
    }
}

CubeFrame frame_at(const TreeMapSpec& spec, const std::vector<int>& digits) {
    require(static_cast<int>(digits.size()) <= spec.r, "frame_at: path deeper than r");
    CubeFrame f;
    f.offset = Vector::Zero(spec.n);
    f.scale = 1.0;
    for (std::size_t k = 0; k < digits.size(); ++k) {
        const double d1 = spec.collar[k];
        for (int i = 0; i < spec.n; ++i) {
            const bool high = (digits[k] >> i) & 1;
            f.offset[i] += f.scale * (high ? 0.5 : d1);
        }
        f.scale *= 0.5 - d1;
        ++f.level;
    }
    return f;
}

FiberDescriptor fiber_of(const TreeMapSpec& spec, const TreePointRef& p) {
    TreePointRef c = shape_canonical(spec.shape(), p);
    const int level = c.edge.level();
    require(level <= spec.r, "fiber_of: point deeper than the map's tree");
    FiberDescriptor desc;
    desc.frame = frame_at(spec, c.edge.digits);
    desc.s = c.s;
    if (level == spec.r) {
        if (c.s >= 1.0) {
            desc.kind = FiberKind::SinglePoint;
            desc.side = 0.0;
        } else {
            desc.kind = FiberKind::CubeBoundary;
            desc.side = desc.frame.scale * (1.0 - c.s);
        }
        return desc;
    }
    const double d1 = spec.collar[level];
    if (c.s >= 1.0) {
        desc.kind = FiberKind::Skeleton;
        desc.side = desc.frame.scale * (0.5 - d1);
    } else {
        desc.kind = FiberKind::CubeBoundary;
        desc.side = desc.frame.scale * (1.0 - 2.0 * c.s * d1);
    }
    return desc;
}

std::vector<Box> fiber_faces(int n, const FiberDescriptor& desc) {
    require(desc.frame.offset.size() == n, "fiber_faces: descriptor dimension mismatch");
    const Vector center = desc.frame.offset.array() + 0.5 * desc.frame.scale;
    std::vector<Box> boxes;
    if (desc.kind == FiberKind::SinglePoint) {
        boxes.push_back(Box{center, center});
        return boxes;
    }
    if (desc.kind == FiberKind::CubeBoundary) {
        const double half = 0.5 * desc.side;
        for (int axis = 0; axis < n; ++axis) {
            for (int side = 0; side < 2; ++side) {
                Box b{center.array() - half, center.array() + half};
                const double w = center[axis] + (side ? half : -half);
                b.lo[axis] = w;
                b.hi[axis] = w;
                boxes.push_back(std::move(b));
            }
        }
        return boxes;
    }
    // Skeleton: 3 wall positions per axis, cross-section split into 2^{n-1} cells of side h.
    const double h = desc.side;
    for (int axis = 0; axis < n; ++axis) {
        for (int wall = 0; wall < 3; ++wall) {
            const double w = center[axis] + (wall - 1) * h;
            const int cells = 1 << (n - 1);
            for (int mask = 0; mask < cells; ++mask) {
                Box b{Vector(n), Vector(n)};
                b.lo[axis] = w;
                b.hi[axis] = w;
                int bit = 0;
                for (int j = 0; j < n; ++j) {
                    if (j == axis) continue;
                    const bool high = (mask >> bit) & 1;
                    b.lo[j] = center[j] - h + (high ? h : 0.0);
                    b.hi[j] = b.lo[j] + h;
                    ++bit;
                }
                boxes.push_back(std::move(b));
            }
        }
    }
    return boxes;
}

double fiber_volume(int n, const FiberDescriptor& desc) {
    switch (desc.kind) {
        case FiberKind::SinglePoint:
            return 0.0;
        case FiberKind::CubeBoundary:
            return 2.0 * n * std::pow(desc.side, n - 1);
        case FiberKind::Skeleton:
            return 3.0 * n * std::pow(2.0, n - 1) * std::pow(desc.side, n - 1);
    }
    return 0.0;
}

double exceptional_volume(const TreeMapSpec& spec) {
    return exceptional_level_fraction(spec, 0);
}

double exceptional_level_fraction(const TreeMapSpec& spec, int level) {
    require(level >= 0 && level <= spec.r, "exceptional_level_fraction: level out of range");
    double keep = 1.0;
    for (int k = level; k < spec.r; ++k)
        keep *= std::pow(1.0 - 2.0 * spec.collar[k], spec.n);
    return 1.0 - keep;
}

double small_fiber_coverage(const TreeMapSpec& spec, double side_threshold) {
    require(side_threshold >= 0.0, "small_fiber_coverage: threshold >= 0 required");
    const double t = side_threshold;
    double covered = 0.0;
    double frames = 1.0;  // 2^{nk}
    for (int k = 0; k < spec.r; ++k) {
        const double sk = spec.scale[k];
        const double inner = std::pow(1.0 - 2.0 * spec.collar[k], spec.n);
        const double reach = std::pow(std::min(t / sk, 1.0), spec.n);
        covered += frames * std::pow(sk, spec.n) * std::max(0.0, reach - inner);
        frames *= std::pow(2.0, spec.n);
    }
    const double sr = spec.scale[spec.r];
    covered += frames * std::pow(sr, spec.n) * std::pow(std::min(t / sr, 1.0), spec.n);
    return covered;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string treemap_to_toml(const TreeMapSpec& spec) {
    std::ostringstream os;
    os << "n = " << spec.n << "\n";
    os << "r = " << spec.r << "\n";
    os << "delta = " << format_double(spec.delta) << "\n";
    return os.str();
}

TreeMapSpec treemap_from_toml(const std::string& text) {
    int n = -1, r = -1;
    double delta = -1.0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "n")
            n = std::stoi(val);
        else if (key == "r")
            r = std::stoi(val);
        else if (key == "delta")
            delta = std::stod(val);
    }
    require(n > 0 && r >= 0 && delta > 0.0, "treemap_from_toml: missing n, r, or delta");
    return build_tree_map(n, r, delta);
}

nlohmann::json treemap_to_json(const TreeMapSpec& spec) {
    return {{"schema", "treemap/1"},
            {"n", spec.n},
            {"r", spec.r},
            {"delta", spec.delta},
            {"delta_level", spec.delta_level},
            {"collar", spec.collar},
            {"scale", spec.scale}};
}

}  // namespace smallfiber
