// Brute-force EER references, independent of the library implementation:
// direct counting over exhaustive thresholds for the interpolated method,
// a geometric convex hull (monotone chain) for the rocch method.
#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace eer_oracle {

struct Point {
    double miss, fa;
};

inline std::vector<Point> operating_points(const std::vector<double>& genuine,
                                           const std::vector<double>& spoof) {
    std::vector<double> thresholds;
    thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
    thresholds.insert(thresholds.end(), spoof.begin(), spoof.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<Point> pts;
    for (double t : thresholds) {
        std::size_t miss = 0, fa = 0;
        for (double g : genuine)
            if (g < t) ++miss;
        for (double s : spoof)
            if (s >= t) ++fa;
        pts.push_back({static_cast<double>(miss) / static_cast<double>(genuine.size()),
                       static_cast<double>(fa) / static_cast<double>(spoof.size())});
    }
    pts.push_back({1.0, 0.0});
    return pts;
}

inline double diagonal_crossing(const std::vector<Point>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = pts[i].miss - pts[i].fa;
        if (d == 0.0) return pts[i].miss;
        if (d > 0.0) {
            const Point& a = pts[i - 1];
            const Point& b = pts[i];
            const double t = (a.fa - a.miss) / ((b.miss - a.miss) - (b.fa - a.fa));
            return a.miss + t * (b.miss - a.miss);
        }
    }
    return 1.0;
}

inline double interpolated(const std::vector<double>& genuine, const std::vector<double>& spoof) {
    return diagonal_crossing(operating_points(genuine, spoof));
}

inline double rocch(const std::vector<double>& genuine, const std::vector<double>& spoof) {
    auto pts = operating_points(genuine, spoof);
    std::vector<std::pair<double, double>> xy;  // (fa, miss)
    for (const Point& p : pts) xy.emplace_back(p.fa, p.miss);
    std::sort(xy.begin(), xy.end());
    // best (lowest-miss) point per false-alarm rate, then the lower hull
    std::vector<std::pair<double, double>> best;
    for (const auto& p : xy)
        if (best.empty() || best.back().first != p.first) best.push_back(p);
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : best) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.first - a.first) * (p.second - a.second) -
                                 (b.second - a.second) * (p.first - a.first);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<Point> hp;
    for (auto it = hull.rbegin(); it != hull.rend(); ++it) hp.push_back({it->second, it->first});
    return diagonal_crossing(hp);
}

}  // namespace eer_oracle
