#pragma once

#include <cmath>

#include "minutia/image.hpp"

namespace minutia {

/// Horizontal (column-direction) and vertical (row-direction, downward) gradients.
struct Gradients {
    FloatImage gx;
    FloatImage gy;
};

/// 3x3 Sobel correlation with edge-replicated borders.
template <typename T>
Gradients sobel(const Image<T>& img)
{
    Gradients g{FloatImage(img.width(), img.height()), FloatImage(img.width(), img.height())};
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            auto p = [&](int dr, int dc) { return static_cast<double>(img.clamped(r + dr, c + dc)); };
            g.gx(r, c) = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            g.gy(r, c) = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
        }
    }
    return g;
}

inline FloatImage gradient_magnitude(const Gradients& g)
{
    FloatImage out(g.gx.width(), g.gx.height());
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c)
            out(r, c) = std::hypot(g.gx(r, c), g.gy(r, c));
    return out;
}

/// Index reflected into [0, n) with the edge sample repeated (…2 1 0 | 0 1 2… ).
inline int reflect_index(int i, int n) noexcept
{
    if (n == 1)
        return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0)
        i += period;
    return i < n ? i : period - 1 - i;
}

/// Pearson correlation over the pixels where `mask` is set (all pixels if mask is empty).
inline double pearson(const FloatImage& a, const FloatImage& b, const BinaryImage* mask = nullptr)
{
    double sa = 0, sb = 0, n = 0;
    for (int r = 0; r < a.height(); ++r)
        for (int c = 0; c < a.width(); ++c)
            if (!mask || (*mask)(r, c)) {
                sa += a(r, c);
                sb += b(r, c);
                n += 1;
            }
    if (n < 2)
        return 0.0;
    const double ma = sa / n;
    const double mb = sb / n;
    double cab = 0, caa = 0, cbb = 0;
    for (int r = 0; r < a.height(); ++r)
        for (int c = 0; c < a.width(); ++c)
            if (!mask || (*mask)(r, c)) {
                const double da = a(r, c) - ma;
                const double db = b(r, c) - mb;
                cab += da * db;
                caa += da * da;
                cbb += db * db;
            }
    if (caa <= 0 || cbb <= 0)
        return 0.0;
    return cab / std::sqrt(caa * cbb);
}

} // namespace minutia
