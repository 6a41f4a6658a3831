#include "mosaic/planar.hpp"

#include <algorithm>
#include <cmath>

namespace mosaic::planar {

double signed_area(std::span<const Vec2> poly) {
    if (poly.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

namespace {

std::vector<Vec2> ccw(std::span<const Vec2> poly) {
    std::vector<Vec2> out(poly.begin(), poly.end());
    if (signed_area(out) < 0.0) std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
    std::vector<Vec2> output = ccw(subject);
    const std::vector<Vec2> window = ccw(clip);
    if (window.size() < 3) return {};

    for (std::size_t e = 0; e < window.size() && !output.empty(); ++e) {
        const Vec2 a = window[e];
        const Vec2 b = window[(e + 1) % window.size()];
        const Vec2 edge = b - a;
        auto side = [&](Vec2 p) { return cross(edge, p - a); };

        std::vector<Vec2> input;
        input.swap(output);
        for (std::size_t i = 0; i < input.size(); ++i) {
            const Vec2 cur = input[i];
            const Vec2 prev = input[(i + input.size() - 1) % input.size()];
            const double s_cur = side(cur);
            const double s_prev = side(prev);
            if (s_cur >= 0.0) {
                if (s_prev < 0.0) {
                    const double t = s_prev / (s_prev - s_cur);
                    output.push_back(prev + t * (cur - prev));
                }
                output.push_back(cur);
            } else if (s_prev >= 0.0) {
                const double t = s_prev / (s_prev - s_cur);
                output.push_back(prev + t * (cur - prev));
            }
        }
    }
    return output;
}

}  // namespace mosaic::planar
