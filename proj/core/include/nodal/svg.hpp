#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nodal/coupling.hpp"
#include "nodal/geometry.hpp"
#include "nodal/nodal_set.hpp"

namespace nodal::svg {

// Fixed 800x600 viewport with uniform world scaling and a small legend.
class Canvas {
public:
    Canvas(const geo::BBox& world, double pad_fraction = 0.05);

    void polygon(const std::vector<geo::Point2>& pts, const std::string& stroke,
                 const std::string& fill = "none", double width = 1.5,
                 const std::string& dash = "");
    void segment(geo::Point2 a, geo::Point2 b, const std::string& stroke,
                 double width = 1.0, const std::string& dash = "");
    void circle(geo::Point2 c, double r_world, const std::string& stroke,
                const std::string& dash = "");
    void dot(geo::Point2 c, double r_px, const std::string& fill);
    void legend(const std::vector<std::pair<std::string, std::string>>& entries);

    std::string str() const;
    void save(const std::string& path) const;

    static constexpr int kWidth = 800;
    static constexpr int kHeight = 600;

private:
    std::pair<double, double> map(geo::Point2 p) const;
    double scale_ = 1.0;
    double ox_ = 0.0, oy_ = 0.0;
    std::string body_;
};

// Domain outline, nodal polyline, and when present the example regions.
void render_solution(const std::string& path, const geo::Domain& d,
                     const spectral::NodalSet& nodal,
                     const std::optional<geo::TriangleMarkers>& markers,
                     const std::optional<std::pair<double, double>>& strip_halfwidths);

// Domain outline plus a sample of clipped mirror lines along the trajectory.
void render_trajectory(const std::string& path, const geo::Domain& d,
                       const coupling::Trajectory& traj, int max_mirrors = 60);

}  // namespace nodal::svg
