#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "minutia/filters.hpp"
#include "minutia/image.hpp"
#include "minutia/minutiae.hpp"
#include "minutia/random.hpp"

namespace minutia {

/// Reference bits [0, 1] followed by 8 bits per table row.
using WatermarkBits = std::vector<std::uint8_t>;

inline constexpr int kBitsPerCount = 4;
inline constexpr int kMaxEncodableCount = (1 << kBitsPerCount) - 1;

inline std::size_t watermark_length(std::size_t rows) { return 2 + rows * 2 * kBitsPerCount; }

inline WatermarkBits encode_table(const MinutiaeTable& t)
{
    WatermarkBits bits{0, 1};
    auto put = [&](int v) {
        if (v < 0 || v > kMaxEncodableCount)
            throw Error("count " + std::to_string(v) + " does not fit in 4 bits");
        for (int b = kBitsPerCount - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    };
    for (const auto& r : t.rows) {
        put(r.term);
        put(r.bif);
    }
    return bits;
}

/// Inverse of encode_table. The reference bits are skipped, not checked, so
/// tables can be decoded from damaged extractions.
inline MinutiaeTable decode_table(const WatermarkBits& bits)
{
    if (bits.size() < 2 || (bits.size() - 2) % (2 * kBitsPerCount) != 0)
        throw Error("malformed watermark length " + std::to_string(bits.size()));
    MinutiaeTable t;
    auto get = [&](std::size_t at) {
        int v = 0;
        for (int b = 0; b < kBitsPerCount; ++b)
            v = (v << 1) | (bits[at + static_cast<std::size_t>(b)] ? 1 : 0);
        return v;
    };
    for (std::size_t at = 2; at < bits.size(); at += 2 * kBitsPerCount)
        t.rows.push_back({get(at), get(at + kBitsPerCount)});
    return t;
}

struct EmbedParams {
    double q = 0.1;
    double A = 100.0;
    double B = 1000.0;
    double rho = 0.18;
    int margin = 2;
    std::uint64_t key1 = 23021979;  // bit permutation
    std::uint64_t key2 = 101487403; // pixel locations

    void validate() const
    {
        if (!(q > 0))
            throw Error("embedding strength q must be positive");
        if (!(rho > 0 && rho <= 1))
            throw Error("embedding density rho must lie in (0, 1]");
        if (margin < 1)
            throw Error("margin must be at least 1");
        if (!(A > 0) || !(B > 0))
            throw Error("texture weights must be positive");
    }
};

struct PixelLocation {
    int row;
    int col;
};

struct EmbedPlan {
    std::vector<PixelLocation> locations;
    std::size_t n_rep = 0;
};

/// Keyed pixel selection: every pixel draws one uniform number from the key2
/// stream in row-major order and is kept when the draw is below rho and it
/// lies at least `margin` pixels from every border.
inline EmbedPlan plan_embedding(int width, int height, const EmbedParams& params, std::size_t wm_len)
{
    if (!(params.rho > 0 && params.rho <= 1))
        throw Error("image too small for watermark");
    params.validate();
    if (wm_len == 0)
        throw Error("empty watermark");
    SplitMix64 rng(params.key2);
    const int c = params.margin;
    EmbedPlan plan;
    for (int r = 0; r < height; ++r)
        for (int col = 0; col < width; ++col) {
            const double u = rng.uniform01();
            if (u < params.rho && r >= c && r < height - c && col >= c && col < width - c)
                plan.locations.push_back({r, col});
        }
    plan.n_rep = plan.locations.size() / wm_len;
    if (plan.n_rep == 0)
        throw Error("image too small for watermark");
    return plan;
}

/// Key1 permutation: position k of the embedded stream carries source bit perm[k].
inline std::vector<std::size_t> watermark_permutation(std::size_t wm_len, std::uint64_t key1)
{
    SplitMix64 rng(key1);
    return random_permutation(wm_len, rng);
}

inline constexpr std::uint64_t kFlattenStream = 0x5bd1e9955bd1e995ULL;

/// Replaces near-white background (245..255) with keyed values spread over 225..235.
inline GrayImage flatten_background(const GrayImage& img, std::uint64_t key2)
{
    SplitMix64 rng(key2 ^ kFlattenStream);
    GrayImage out = img;
    for (auto& p : out.pixels())
        if (p >= 245)
            p = static_cast<std::uint8_t>(230 + static_cast<int>(rng() % 11) - 5);
    return out;
}

/// Texture statistics of the margin-c neighbourhood used to scale the embedding.
struct LocalStats {
    double mean;     // (2c+1)^2 square
    double std_dev;  // cross arms, centre excluded, N-1 normalisation
    double gradient; // Sobel magnitude
};

inline LocalStats local_stats(const GrayImage& img, const Gradients& g, int r, int c, int margin)
{
    double sum = 0.0;
    for (int dr = -margin; dr <= margin; ++dr)
        for (int dc = -margin; dc <= margin; ++dc)
            sum += img.clamped(r + dr, c + dc);
    const double side = 2.0 * margin + 1.0;
    std::vector<double> cross;
    for (int d = -margin; d <= margin; ++d) {
        if (d == 0)
            continue;
        cross.push_back(img.clamped(r + d, c));
        cross.push_back(img.clamped(r, c + d));
    }
    const double m = std::accumulate(cross.begin(), cross.end(), 0.0) / static_cast<double>(cross.size());
    double ss = 0.0;
    for (double v : cross)
        ss += (v - m) * (v - m);
    return {sum / (side * side), std::sqrt(ss / static_cast<double>(cross.size() - 1)),
            std::hypot(g.gx(r, c), g.gy(r, c))};
}

/// Additive amplitude modulation of one pixel: bit 1 raises, bit 0 lowers.
inline double modulate(double pixel, int bit, const LocalStats& s, const EmbedParams& p)
{
    return pixel + (2.0 * bit - 1.0) * s.mean * p.q * (1.0 + s.std_dev / p.A) * (1.0 + s.gradient / p.B);
}

inline GrayImage embed(const GrayImage& img, const WatermarkBits& bits, const EmbedParams& params)
{
    params.validate();
    const auto plan = plan_embedding(img.width(), img.height(), params, bits.size());
    const GrayImage host = flatten_background(img, params.key2);
    const auto grad = sobel(host);
    const auto perm = watermark_permutation(bits.size(), params.key1);
    FloatImage out = to_float(host);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        const int bit = bits[perm[k]] ? 1 : 0;
        for (std::size_t t = k * plan.n_rep; t < (k + 1) * plan.n_rep; ++t) {
            const auto [r, c] = plan.locations[t];
            out(r, c) = modulate(host(r, c), bit, local_stats(host, grad, r, c, params.margin), params);
        }
    }
    return quantize(out);
}

/// Cross-neighbourhood prediction of a pixel from its 4c arm pixels.
inline double predict_pixel(const GrayImage& img, int r, int c, int margin)
{
    double s = 0.0;
    for (int d = -margin; d <= margin; ++d) {
        s += img(r + d, c);
        s += img(r, c + d);
    }
    s -= 2.0 * img(r, c);
    return s / (4.0 * margin);
}

struct Extraction {
    WatermarkBits bits;
    double threshold = 0.0;
    std::vector<double> delta_bar; // per source bit (after inverse permutation)
};

inline Extraction extract(const GrayImage& wimg, const EmbedParams& params, std::size_t wm_len)
{
    params.validate();
    if (wm_len < 2)
        throw Error("watermark must contain the two reference bits");
    const auto plan = plan_embedding(wimg.width(), wimg.height(), params, wm_len);
    const auto perm = watermark_permutation(wm_len, params.key1);
    std::vector<double> dbar(wm_len, 0.0);
    for (std::size_t k = 0; k < wm_len; ++k) {
        double s = 0.0;
        for (std::size_t t = k * plan.n_rep; t < (k + 1) * plan.n_rep; ++t) {
            const auto [r, c] = plan.locations[t];
            s += wimg(r, c) - predict_pixel(wimg, r, c, params.margin);
        }
        dbar[k] = s / static_cast<double>(plan.n_rep);
    }
    std::size_t pos0 = 0, pos1 = 0;
    for (std::size_t k = 0; k < wm_len; ++k) {
        if (perm[k] == 0)
            pos0 = k;
        if (perm[k] == 1)
            pos1 = k;
    }
    Extraction ex;
    ex.threshold = 0.5 * (dbar[pos0] + dbar[pos1]);
    ex.bits.assign(wm_len, 0);
    ex.delta_bar.assign(wm_len, 0.0);
    for (std::size_t k = 0; k < wm_len; ++k) {
        ex.bits[perm[k]] = dbar[k] > ex.threshold ? 1 : 0;
        ex.delta_bar[perm[k]] = dbar[k];
    }
    return ex;
}

/// Host estimate: interior pixels replaced by their cross prediction.
inline GrayImage reconstruct_host(const GrayImage& wimg, int margin = 2)
{
    GrayImage out = wimg;
    for (int r = margin; r < wimg.height() - margin; ++r)
        for (int c = margin; c < wimg.width() - margin; ++c)
            out(r, c) = quantize(predict_pixel(wimg, r, c, margin));
    return out;
}

/// Normalised correlation x.y / (|x| |y|) as a percentage.
template <typename A, typename B>
double similarity(const A& a, const B& b)
{
    if (std::size(a) != std::size(b))
        throw Error("similarity: length mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    auto ia = std::begin(a);
    auto ib = std::begin(b);
    for (; ia != std::end(a); ++ia, ++ib) {
        const double x = static_cast<double>(*ia);
        const double y = static_cast<double>(*ib);
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if (aa == 0.0 || bb == 0.0)
        throw Error("similarity: zero-norm operand");
    return 100.0 * ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline double similarity(const GrayImage& a, const GrayImage& b)
{
    if (a.width() != b.width() || a.height() != b.height())
        throw Error("similarity: image dimensions differ");
    return similarity(a.pixels(), b.pixels());
}

/// Percentage of equal bits.
inline double bit_accuracy(const WatermarkBits& a, const WatermarkBits& b)
{
    if (a.size() != b.size() || a.empty())
        throw Error("bit accuracy: length mismatch");
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        same += (a[i] != 0) == (b[i] != 0) ? 1 : 0;
    return 100.0 * static_cast<double>(same) / static_cast<double>(a.size());
}

// ---------------------------------------------------------------------------
// Attacks
// ---------------------------------------------------------------------------

inline GrayImage attack_gaussian(const GrayImage& img, double sigma, std::uint64_t seed)
{
    if (sigma < 0)
        throw Error("noise sigma must be non-negative");
    if (sigma == 0)
        return img;
    SplitMix64 rng(seed);
    FloatImage out = to_float(img);
    for (auto& p : out.pixels())
        p += sigma * rng.normal();
    return quantize(out);
}

namespace detail {

template <typename F>
GrayImage window_filter(const GrayImage& img, int k, F&& reduce)
{
    if (k < 1 || k % 2 == 0)
        throw Error("filter size must be odd and positive");
    const int h = k / 2;
    GrayImage out(img.width(), img.height());
    std::vector<double> win;
    win.reserve(static_cast<std::size_t>(k * k));
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            win.clear();
            for (int dr = -h; dr <= h; ++dr)
                for (int dc = -h; dc <= h; ++dc)
                    win.push_back(img.clamped(r + dr, c + dc));
            out(r, c) = quantize(reduce(win));
        }
    return out;
}

} // namespace detail

inline GrayImage attack_median(const GrayImage& img, int k = 3)
{
    return detail::window_filter(img, k, [](std::vector<double>& w) {
        const auto mid = w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2);
        std::nth_element(w.begin(), mid, w.end());
        return *mid;
    });
}

inline GrayImage attack_trimmed_mean(const GrayImage& img, int k = 3, int trim = 2)
{
    if (trim < 0 || 2 * trim >= k * k)
        throw Error("trim must leave at least one window sample");
    return detail::window_filter(img, k, [trim](std::vector<double>& w) {
        std::sort(w.begin(), w.end());
        double s = 0.0;
        for (std::size_t i = static_cast<std::size_t>(trim); i < w.size() - static_cast<std::size_t>(trim); ++i)
            s += w[i];
        return s / static_cast<double>(w.size() - 2 * static_cast<std::size_t>(trim));
    });
}

/// Adaptive local Wiener filter; the noise power is the mean local variance.
inline GrayImage attack_wiener(const GrayImage& img, int k = 3)
{
    if (k < 1 || k % 2 == 0)
        throw Error("filter size must be odd and positive");
    const int h = k / 2;
    FloatImage mu(img.width(), img.height());
    FloatImage var(img.width(), img.height());
    double noise = 0.0;
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            double s = 0.0, s2 = 0.0;
            for (int dr = -h; dr <= h; ++dr)
                for (int dc = -h; dc <= h; ++dc) {
                    const double v = img.clamped(r + dr, c + dc);
                    s += v;
                    s2 += v * v;
                }
            const double n = static_cast<double>(k * k);
            mu(r, c) = s / n;
            var(r, c) = std::max(0.0, s2 / n - mu(r, c) * mu(r, c));
            noise += var(r, c);
        }
    noise /= static_cast<double>(img.size());
    FloatImage out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const double v = var(r, c);
            const double denom = std::max(v, noise);
            const double gain = denom > 0 ? std::max(v - noise, 0.0) / denom : 0.0;
            out(r, c) = mu(r, c) + gain * (img(r, c) - mu(r, c));
        }
    return quantize(out);
}

enum class AttackKind { gaussian, median, trimmed_mean, wiener };

inline AttackKind parse_attack_kind(const std::string& s)
{
    if (s == "gaussian")
        return AttackKind::gaussian;
    if (s == "median")
        return AttackKind::median;
    if (s == "trimmed" || s == "trimmed_mean")
        return AttackKind::trimmed_mean;
    if (s == "wiener")
        return AttackKind::wiener;
    throw Error("unknown attack '" + s + "'");
}

struct AttackParams {
    double sigma = 3.0;
    int k = 3;
    int trim = 2;
    std::uint64_t seed = 0;
};

inline GrayImage attack(const GrayImage& img, AttackKind kind, const AttackParams& p = {})
{
    switch (kind) {
    case AttackKind::gaussian: return attack_gaussian(img, p.sigma, p.seed);
    case AttackKind::median: return attack_median(img, p.k);
    case AttackKind::trimmed_mean: return attack_trimmed_mean(img, p.k, p.trim);
    case AttackKind::wiener: return attack_wiener(img, p.k);
    }
    throw Error("unknown attack");
}

} // namespace minutia
