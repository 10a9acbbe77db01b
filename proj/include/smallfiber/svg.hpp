#ifndef SMALLFIBER_SVG_HPP
#define SMALLFIBER_SVG_HPP

#include "smallfiber/common.hpp"
#include "smallfiber/tree_map.hpp"

#include <string>
#include <utility>
#include <vector>

namespace smallfiber {

// Minimal SVG 1.1 assembler. Coordinates are printed with fixed precision so a given
// element sequence always serializes to the same bytes.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width, const std::string& cls = "");
    void rect(double x, double y, double w, double h, const std::string& stroke,
              double stroke_width, const std::string& fill = "none",
              const std::string& cls = "");
    void circle(double cx, double cy, double radius, const std::string& fill,
                const std::string& cls = "");
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width, const std::string& cls = "");
    void text(double x, double y, const std::string& content, double size,
              const std::string& fill = "#222222");

    std::string str() const;

private:
    double width_ = 0.0;
    double height_ = 0.0;
    std::vector<std::string> elements_;
};

// Fiber-class figure of the n = 2 tree map over the unit square: per frame the inner
// collar square, the junction skeleton walls, and leaf frames with their centers, each
// stroke-colored by the total length of that fiber (buckets: <= 1, <= 6, above), plus a
// legend naming the bucket thresholds.
std::string render_fiber_classes_svg(const TreeMapSpec& spec, Index resolution = 800);

struct ChartSeries {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

// Line chart with labeled, ticked axes (used for volume-versus-epsilon curves).
std::string render_line_chart_svg(const std::string& title, const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series, Index resolution = 800);

}  // namespace smallfiber

#endif
