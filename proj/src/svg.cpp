#include "smallfiber/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace smallfiber {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string attr_class(const std::string& cls) {
    if (cls.empty()) return "";
    return " class=\"" + cls + "\"";
}

// Stroke color by total fiber length: short fibers dominate the figure.
std::string bucket_color(double length) {
    if (length <= 1.0) return "#2a9d3a";
    if (length <= 6.0) return "#e08a00";
    return "#cc2222";
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double stroke_width, const std::string& cls) {
    elements_.push_back("<line" + attr_class(cls) + " x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) +
                        "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke +
                        "\" stroke-width=\"" + fmt(stroke_width) + "\"/>");
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& stroke,
                     double stroke_width, const std::string& fill, const std::string& cls) {
    elements_.push_back("<rect" + attr_class(cls) + " x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
                        "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" stroke=\"" +
                        stroke + "\" stroke-width=\"" + fmt(stroke_width) + "\" fill=\"" + fill +
                        "\"/>");
}

void SvgCanvas::circle(double cx, double cy, double radius, const std::string& fill,
                       const std::string& cls) {
    elements_.push_back("<circle" + attr_class(cls) + " cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) +
                        "\" r=\"" + fmt(radius) + "\" fill=\"" + fill + "\"/>");
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& stroke, double stroke_width,
                         const std::string& cls) {
    std::string d;
    for (const auto& [x, y] : pts) {
        if (!d.empty()) d += " ";
        d += fmt(x) + "," + fmt(y);
    }
    elements_.push_back("<polyline" + attr_class(cls) + " points=\"" + d + "\" stroke=\"" +
                        stroke + "\" stroke-width=\"" + fmt(stroke_width) + "\" fill=\"none\"/>");
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& fill) {
    elements_.push_back("<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
                        fmt(size) + "\" font-family=\"sans-serif\" fill=\"" + fill + "\">" +
                        content + "</text>");
}

std::string SvgCanvas::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
                      fmt(width_) + "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " +
                      fmt(width_) + " " + fmt(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width_) + "\" height=\"" + fmt(height_) +
           "\" fill=\"#ffffff\"/>\n";
    for (const std::string& e : elements_) {
        out += e;
        out += '\n';
    }
    out += "</svg>\n";
    return out;
}

std::string render_fiber_classes_svg(const TreeMapSpec& spec, Index resolution) {
    require(spec.n == 2, "render_fiber_classes_svg: n = 2 only");
    require(resolution >= 100, "render_fiber_classes_svg: resolution >= 100 required");
    const double size = static_cast<double>(resolution);
    const double margin = 12.0;
    const double legend_height = 56.0;
    SvgCanvas canvas(size, size + legend_height);
    const auto px = [&](double x) { return margin + x * (size - 2 * margin); };
    const auto py = [&](double y) { return margin + (1.0 - y) * (size - 2 * margin); };
    const auto square = [&](const Vector& lo, double side, double length, double width,
                            const std::string& cls) {
        canvas.rect(px(lo[0]), py(lo[1] + side), side * (size - 2 * margin),
                    side * (size - 2 * margin), bucket_color(length), width, "none", cls);
    };

    // Root fiber: the unit square boundary itself.
    Vector origin = Vector::Zero(2);
    square(origin, 1.0, 4.0, 2.0, "collar");

    std::vector<std::vector<int>> level{{}};
    for (int k = 0; k <= spec.r; ++k) {
        for (const std::vector<int>& digits : level) {
            const CubeFrame frame = frame_at(spec, digits);
            if (k < spec.r) {
                const double d1 = spec.collar[static_cast<std::size_t>(k)];
                // Innermost collar square of this frame (s = 1).
                const double side = frame.scale * (1.0 - 2.0 * d1);
                const Vector lo = frame.offset.array() + 0.5 * (frame.scale - side);
                square(lo, side, 4.0 * side, 1.2, "collar");
                // Junction skeleton: three walls per axis spanning the subcube array.
                const double h = frame.scale * (0.5 - d1);
                const Vector c = frame.offset.array() + 0.5 * frame.scale;
                const double len = 12.0 * h;
                const std::string color = bucket_color(len);
                for (int wall = 0; wall < 3; ++wall) {
                    const double t = c[0] + (wall - 1) * h;
                    canvas.line(px(t), py(c[1] - h), px(t), py(c[1] + h), color, 1.0, "wall");
                    const double s = c[1] + (wall - 1) * h;
                    canvas.line(px(c[0] - h), py(s), px(c[0] + h), py(s), color, 1.0, "wall");
                }
            } else {
                // Leaf frame: outermost fiber square plus the point fiber at the center.
                square(frame.offset, frame.scale, 4.0 * frame.scale, 1.0, "collar");
                const Vector c = frame.offset.array() + 0.5 * frame.scale;
                canvas.circle(px(c[0]), py(c[1]), 1.6, bucket_color(0.0), "point");
            }
        }
        if (k == spec.r) break;
        std::vector<std::vector<int>> next;
        for (const std::vector<int>& digits : level)
            for (int digit = 0; digit < 4; ++digit) {
                std::vector<int> child = digits;
                child.push_back(digit);
                next.push_back(child);
            }
        level = std::move(next);
    }

    // Legend: bucket thresholds.
    const double ly = size + 18.0;
    canvas.rect(margin, ly, 18, 12, "#2a9d3a", 1.4, "none", "legend");
    canvas.text(margin + 26, ly + 10, "fiber length &lt;= 1", 13);
    canvas.rect(margin + 190, ly, 18, 12, "#e08a00", 1.4, "none", "legend");
    canvas.text(margin + 216, ly + 10, "fiber length &lt;= 6", 13);
    canvas.text(margin, ly + 32,
                "collar squares, junction skeleta, and leaf centers of the recursive map", 12,
                "#555555");
    return canvas.str();
}

std::string render_line_chart_svg(const std::string& title, const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series, Index resolution) {
    require(!series.empty(), "render_line_chart_svg: at least one series required");
    require(resolution >= 200, "render_line_chart_svg: resolution >= 200 required");
    const double w = static_cast<double>(resolution);
    const double h = w * 0.62;
    const double left = 64.0, right = 18.0, top = 34.0, bottom = 48.0;
    double x_lo = kInf, x_hi = -kInf, y_lo = kInf, y_hi = -kInf;
    for (const ChartSeries& s : series)
        for (const auto& [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    require(x_lo <= x_hi && y_lo <= y_hi, "render_line_chart_svg: series must have points");
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    const double pad_y = 0.06 * (y_hi - y_lo);
    y_lo -= pad_y;
    y_hi += pad_y;

    SvgCanvas canvas(w, h);
    const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (w - left - right); };
    const auto py = [&](double y) {
        return h - bottom - (y - y_lo) / (y_hi - y_lo) * (h - top - bottom);
    };
    canvas.line(left, h - bottom, w - right, h - bottom, "#222222", 1.2, "axis");
    canvas.line(left, h - bottom, left, top, "#222222", 1.2, "axis");
    for (int tick = 0; tick <= 5; ++tick) {
        const double tx = x_lo + (x_hi - x_lo) * tick / 5.0;
        const double ty = y_lo + (y_hi - y_lo) * tick / 5.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", tx);
        canvas.line(px(tx), h - bottom, px(tx), h - bottom + 5, "#222222", 1.0, "tick");
        canvas.text(px(tx) - 10, h - bottom + 20, buf, 11);
        std::snprintf(buf, sizeof(buf), "%.3g", ty);
        canvas.line(left - 5, py(ty), left, py(ty), "#222222", 1.0, "tick");
        canvas.text(8, py(ty) + 4, buf, 11);
    }
    canvas.text(0.5 * w - 4.0 * static_cast<double>(title.size()) / 2.0, 20, title, 14);
    canvas.text(0.5 * w - 12, h - 10, x_label, 12);
    canvas.text(8, top - 10, y_label, 12);

    double legend_y = top + 8;
    for (const ChartSeries& s : series) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(s.points.size());
        for (const auto& [x, y] : s.points) pts.emplace_back(px(x), py(y));
        canvas.polyline(pts, s.color, 1.6, "series");
        canvas.line(w - right - 120, legend_y, w - right - 100, legend_y, s.color, 2.0, "legend");
        canvas.text(w - right - 94, legend_y + 4, s.name, 12);
        legend_y += 18;
    }
    return canvas.str();
}

}  // namespace smallfiber
