#include "frm/plot.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace frm {

namespace {

constexpr double kCanvas = 600.0;

struct Frame {
    Eigen::Vector2d lo, hi;
    [[nodiscard]] double scale() const { return kCanvas / std::max(hi.x() - lo.x(), hi.y() - lo.y()); }
    [[nodiscard]] double x(double v) const { return (v - lo.x()) * scale(); }
    [[nodiscard]] double y(double v) const { return kCanvas - (v - lo.y()) * scale(); }
};

}  // namespace

std::string render_svg(const Problem& problem, const BaseRoadmap* roadmap, const std::vector<Trajectory>& paths) {
    const auto& env = *problem.env;
    const int ax = env.robot().x_axis, ay = env.robot().y_axis;
    const Frame f{{env.lower()[ax], env.lower()[ay]}, {env.upper()[ax], env.upper()[ay]}};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\"" << kCanvas << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"black\"/>\n";
    for (const auto& s : env.robot_obstacles()) {
        if (const auto* b = std::get_if<Box2>(&s))
            svg << "<rect x=\"" << f.x(b->min.x()) << "\" y=\"" << f.y(b->max.y()) << "\" width=\""
                << (b->max.x() - b->min.x()) * f.scale() << "\" height=\"" << (b->max.y() - b->min.y()) * f.scale()
                << "\" fill=\"#555\"/>\n";
        else if (const auto* d = std::get_if<Disc2>(&s))
            svg << "<circle cx=\"" << f.x(d->center.x()) << "\" cy=\"" << f.y(d->center.y()) << "\" r=\""
                << d->radius * f.scale() << "\" fill=\"#555\"/>\n";
    }
    if (roadmap) {
        for (const auto& [a, b] : roadmap->edges) {
            const auto& ma = roadmap->components[static_cast<std::size_t>(a)].mean;
            const auto& mb = roadmap->components[static_cast<std::size_t>(b)].mean;
            svg << "<line x1=\"" << f.x(ma[ax]) << "\" y1=\"" << f.y(ma[ay]) << "\" x2=\"" << f.x(mb[ax]) << "\" y2=\""
                << f.y(mb[ay]) << "\" stroke=\"#9ab\" stroke-width=\"1\"/>\n";
        }
        for (const auto& c : roadmap->components) {
            Eigen::Matrix2d cov;
            cov << c.covariance(ax, ax), c.covariance(ax, ay), c.covariance(ay, ax), c.covariance(ay, ay);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
            const Eigen::Vector2d axes = 2.0 * es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            const double angle = std::atan2(es.eigenvectors()(1, 1), es.eigenvectors()(0, 1)) * 180.0 / std::numbers::pi;
            svg << "<ellipse cx=\"" << f.x(c.mean[ax]) << "\" cy=\"" << f.y(c.mean[ay]) << "\" rx=\"" << axes[1] * f.scale()
                << "\" ry=\"" << axes[0] * f.scale() << "\" transform=\"rotate(" << -angle << ' ' << f.x(c.mean[ax]) << ' '
                << f.y(c.mean[ay]) << ")\" fill=\"none\" stroke=\"#27c\" stroke-opacity=\"0.6\"/>\n";
        }
    }
    for (const auto& path : paths) {
        svg << "<polyline fill=\"none\" stroke=\"#d40\" stroke-width=\"2\" points=\"";
        for (const auto& q : path) svg << f.x(q[ax]) << ',' << f.y(q[ay]) << ' ';
        svg << "\"/>\n";
    }
    for (const auto& [lc, color] : {std::pair{&problem.start, "#2a2"}, std::pair{&problem.goal, "#c22"}})
        svg << "<circle cx=\"" << f.x(lc->config[ax]) << "\" cy=\"" << f.y(lc->config[ay]) << "\" r=\"5\" fill=\"" << color
            << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string render_success_svg(const std::vector<std::pair<std::string, double>>& rates, const std::string& title) {
    const double bar = 80.0, gap = 30.0, height = 300.0;
    const double width = gap + static_cast<double>(rates.size()) * (bar + gap);
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height + 80 << "\">\n";
    svg << "<text x=\"" << gap << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    double x = gap;
    for (const auto& [name, rate] : rates) {
        const double h = rate * height;
        svg << "<rect x=\"" << x << "\" y=\"" << 40 + height - h << "\" width=\"" << bar << "\" height=\"" << h
            << "\" fill=\"#27c\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << height + 60 << "\" font-family=\"sans-serif\" font-size=\"11\">" << name
            << " " << std::lround(rate * 100) << "%</text>\n";
        x += bar + gap;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace frm
