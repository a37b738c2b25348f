#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "minutia/enhance.hpp"
#include "minutia/filters.hpp"
#include "minutia/image.hpp"
#include "minutia/morphology.hpp"

namespace minutia {

struct CorePoint {
    int x = 0; // column
    int y = 0; // row

    friend bool operator==(const CorePoint&, const CorePoint&) = default;
};

struct CoreParams {
    int filter_order = 1;
    double gaussian_sigma = 7.416198487095663; // sqrt(55)
    int window_halfwidth = 16;
    int var_block = 8;
    double var_threshold = 20.0;
    int close_size = 10;
    int erode_size = 44;
    int mirror_pad = 20;

    void validate() const
    {
        if (filter_order < 1 || !(gaussian_sigma > 0) || window_halfwidth < 1 || var_block < 1 ||
            !(var_threshold > 0) || close_size < 1 || erode_size < 1 || mirror_pad < 0)
            throw Error("core parameters must be positive");
    }
};

enum class SingularityLabel { none, loop, delta, whorl };

inline const char* to_string(SingularityLabel s) noexcept
{
    switch (s) {
    case SingularityLabel::loop: return "loop";
    case SingularityLabel::delta: return "delta";
    case SingularityLabel::whorl: return "whorl";
    default: return "none";
    }
}

using ComplexImage = Image<std::complex<double>>;

namespace detail {

// Central differences in the interior, one-sided at the edges.
inline Gradients central_gradient(const GrayImage& img)
{
    const int h = img.height();
    const int w = img.width();
    Gradients g{FloatImage(w, h), FloatImage(w, h)};
    auto v = [&](int r, int c) { return static_cast<double>(img(r, c)); };
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (w > 1) {
                if (c == 0)
                    g.gx(r, c) = v(r, 1) - v(r, 0);
                else if (c == w - 1)
                    g.gx(r, c) = v(r, c) - v(r, c - 1);
                else
                    g.gx(r, c) = 0.5 * (v(r, c + 1) - v(r, c - 1));
            }
            if (h > 1) {
                if (r == 0)
                    g.gy(r, c) = v(1, c) - v(0, c);
                else if (r == h - 1)
                    g.gy(r, c) = v(r, c) - v(r - 1, c);
                else
                    g.gy(r, c) = 0.5 * (v(r + 1, c) - v(r - 1, c));
            }
        }
    return g;
}

// 1-D convolution along rows (along_cols=false) or columns with kernel k
// indexed by offset -W..W; samples beyond the image read 0.
inline ComplexImage convolve_1d(const ComplexImage& in, const std::vector<std::complex<double>>& k,
                                bool along_cols)
{
    const int half = static_cast<int>(k.size() / 2);
    ComplexImage out(in.width(), in.height());
    for (int r = 0; r < in.height(); ++r)
        for (int c = 0; c < in.width(); ++c) {
            std::complex<double> acc = 0.0;
            for (int d = -half; d <= half; ++d) {
                const int rr = along_cols ? r - d : r;
                const int cc = along_cols ? c : c - d;
                if (!in.contains(rr, cc))
                    continue;
                acc += in(rr, cc) * k[static_cast<std::size_t>(d + half)];
            }
            out(r, c) = acc;
        }
    return out;
}

} // namespace detail

/// Unit-magnitude squared-gradient field (gx + i gy)^2 / |.|; 1 where the gradient vanishes.
inline ComplexImage squared_gradient_field(const GrayImage& img)
{
    const auto g = detail::central_gradient(img);
    ComplexImage z(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const std::complex<double> v(g.gx(r, c), g.gy(r, c));
            const auto sq = v * v;
            const double den = std::abs(sq);
            z(r, c) = den > 0 ? sq / den : std::complex<double>(1.0, 0.0);
        }
    return z;
}

/// Response magnitude of the order-m complex filter g(u,v) (u + i v)^m, with u the
/// row offset, applied by true convolution to the mirror-padded field.
inline FloatImage core_response(const GrayImage& img, const CoreParams& params = {})
{
    params.validate();
    const auto z = squared_gradient_field(img);
    const int h = img.height();
    const int w = img.width();
    const int pad = params.mirror_pad;
    ComplexImage padded(w + 2 * pad, h + 2 * pad);
    for (int r = 0; r < padded.height(); ++r)
        for (int c = 0; c < padded.width(); ++c)
            padded(r, c) = z(reflect_index(r - pad, h), reflect_index(c - pad, w));

    // (u + i v)^m g(u) g(v) = sum_k C(m,k) u^(m-k) g(u) * (i v)^k g(v)
    const int W = params.window_halfwidth;
    const int m = params.filter_order;
    const double s2 = 2.0 * params.gaussian_sigma * params.gaussian_sigma;
    ComplexImage acc(padded.width(), padded.height(), 0.0);
    double binom = 1.0;
    for (int k = 0; k <= m; ++k) {
        std::vector<std::complex<double>> ku(static_cast<std::size_t>(2 * W + 1));
        std::vector<std::complex<double>> kv(ku.size());
        for (int d = -W; d <= W; ++d) {
            const double g = std::exp(-static_cast<double>(d * d) / s2);
            ku[static_cast<std::size_t>(d + W)] = binom * std::pow(static_cast<double>(d), m - k) * g;
            kv[static_cast<std::size_t>(d + W)] =
                std::pow(std::complex<double>(0.0, static_cast<double>(d)), k) * g;
        }
        const auto part = detail::convolve_1d(detail::convolve_1d(padded, ku, true), kv, false);
        for (int r = 0; r < acc.height(); ++r)
            for (int c = 0; c < acc.width(); ++c)
                acc(r, c) += part(r, c);
        binom = binom * static_cast<double>(m - k) / static_cast<double>(k + 1);
    }

    FloatImage out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out(r, c) = std::abs(acc(r + pad, c + pad));
    return out;
}

/// Foreground validity mask from block intensity spread, closed then eroded.
inline BinaryImage core_mask(const GrayImage& img, const CoreParams& params = {})
{
    params.validate();
    const int b = params.var_block;
    const auto grid = block_grid(img, b);
    BinaryImage mask(img.width(), img.height(), 0);
    for (int bi = 0; bi < grid.rows; ++bi)
        for (int bj = 0; bj < grid.cols; ++bj) {
            double sum = 0.0;
            for (int r = bi * b; r < (bi + 1) * b; ++r)
                for (int c = bj * b; c < (bj + 1) * b; ++c)
                    sum += img(r, c);
            const double mean = sum / (b * b);
            double spread = 0.0;
            for (int r = bi * b; r < (bi + 1) * b; ++r)
                for (int c = bj * b; c < (bj + 1) * b; ++c) {
                    const double x = img(r, c);
                    spread += std::abs(mean * mean - x * x);
                }
            if (std::sqrt(spread / (b * b)) > params.var_threshold)
                for (int r = bi * b; r < (bi + 1) * b; ++r)
                    for (int c = bj * b; c < (bj + 1) * b; ++c)
                        mask(r, c) = 1;
        }
    return morph::erode(morph::close(mask, params.close_size), params.erode_size);
}

/// Core point as the masked argmax of the complex-filter response.
/// Ties resolve to the smallest row, then the smallest column.
inline CorePoint complex_core(const GrayImage& img, const CoreParams& params = {})
{
    if (img.empty())
        throw Error("no foreground");
    const auto mask = core_mask(img, params);
    if (morph::count_ones(mask) == 0)
        throw Error("no foreground");
    const auto resp = core_response(img, params);
    CorePoint best{-1, -1};
    double best_v = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            if (mask(r, c) && resp(r, c) > best_v) {
                best_v = resp(r, c);
                best = {c, r};
            }
    return best;
}

/// Eight-neighbour path used by the Poincare index, counter-clockwise from east.
inline constexpr std::array<int, 8> kPoincareRow = {0, -1, -1, -1, 0, 1, 1, 1};
inline constexpr std::array<int, 8> kPoincareCol = {1, 1, 0, -1, -1, -1, 0, 1};

/// Sum in degrees of orientation differences around the closed 8-path, each
/// difference taken in (-90, 90].
inline double poincare_sum(const OrientationField& field, int i, int j)
{
    if (i < 1 || j < 1 || i >= field.rows - 1 || j >= field.cols - 1)
        throw Error("poincare index requires a full 8-neighbourhood");
    double total = 0.0;
    for (int k = 0; k < 8; ++k) {
        const int n = (k + 1) % 8;
        const double a = field.at(i + kPoincareRow[k], j + kPoincareCol[k]);
        const double b = field.at(i + kPoincareRow[n], j + kPoincareCol[n]);
        double d = b - a;
        while (d > std::numbers::pi / 2)
            d -= std::numbers::pi;
        while (d <= -std::numbers::pi / 2)
            d += std::numbers::pi;
        total += d;
    }
    return total * 180.0 / std::numbers::pi;
}

inline SingularityLabel poincare_index(const OrientationField& field, int i, int j)
{
    const double s = poincare_sum(field, i, j);
    constexpr double tol = 10.0;
    if (std::abs(s - 180.0) <= tol)
        return SingularityLabel::loop;
    if (std::abs(s + 180.0) <= tol)
        return SingularityLabel::delta;
    if (std::abs(std::abs(s) - 360.0) <= tol)
        return SingularityLabel::whorl;
    return SingularityLabel::none;
}

} // namespace minutia
