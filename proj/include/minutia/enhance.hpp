#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "minutia/filters.hpp"
#include "minutia/image.hpp"

namespace minutia {

/// Per-block ridge orientation. Angles are measured counter-clockwise from the
/// horizontal axis with the vertical axis pointing up the page, in [0, pi).
struct OrientationField {
    int block_size = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> theta;

    OrientationField() = default;
    OrientationField(int rows_, int cols_, int block_size_, double fill = 0.0)
        : block_size(block_size_), rows(rows_), cols(cols_),
          theta(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), fill)
    {
    }

    double& at(int i, int j) { return theta[static_cast<std::size_t>(i * cols + j)]; }
    double at(int i, int j) const { return theta[static_cast<std::size_t>(i * cols + j)]; }
};

/// Wraps an angle into [0, pi).
inline double wrap_pi(double a) noexcept
{
    a = std::fmod(a, std::numbers::pi);
    if (a < 0)
        a += std::numbers::pi;
    if (a >= std::numbers::pi)
        a -= std::numbers::pi;
    return a;
}

namespace detail {

// Doubled-angle gradient vector (gxx - gyy, 2 gxy) with the y axis pointing up.
struct DoubledVector {
    double x = 0;
    double y = 0;
};

inline DoubledVector doubled(double gx, double gy_down) noexcept
{
    const double gy = -gy_down;
    return {gx * gx - gy * gy, 2.0 * gx * gy};
}

// Ridge orientation orthogonal to the averaged gradient phase.
inline double ridge_angle(const DoubledVector& v) noexcept
{
    const double phi = 0.5 * std::atan2(v.y, v.x);
    return wrap_pi(phi + std::numbers::pi / 2);
}

} // namespace detail

/// Block orientation from 3x3 Sobel gradients averaged as doubled-angle vectors.
/// The image is truncated to whole blocks.
inline OrientationField orientation_field(const GrayImage& img, int block_size)
{
    const auto grid = block_grid(img, block_size);
    if (grid.rows == 0 || grid.cols == 0)
        throw Error("image smaller than one orientation block");
    const auto g = sobel(img);
    OrientationField field(grid.rows, grid.cols, block_size);
    for (int bi = 0; bi < grid.rows; ++bi) {
        for (int bj = 0; bj < grid.cols; ++bj) {
            detail::DoubledVector sum;
            for (int r = bi * block_size; r < (bi + 1) * block_size; ++r)
                for (int c = bj * block_size; c < (bj + 1) * block_size; ++c) {
                    const auto v = detail::doubled(g.gx(r, c), g.gy(r, c));
                    sum.x += v.x;
                    sum.y += v.y;
                }
            field.at(bi, bj) = detail::ridge_angle(sum);
        }
    }
    return field;
}

struct EnhanceParams {
    int block_size = 32;
    int overlap = 16;
    double energy_threshold_percentile = 0.40;
    double angular_bandwidth_base = std::numbers::pi / 8;
    double radial_bandwidth = 0.06; // half-width, cycles/pixel
    double min_frequency = 1.0 / 25.0;
    double max_frequency = 1.0 / 3.0;

    void validate() const
    {
        if (block_size < 4 || overlap <= 0 || overlap >= block_size)
            throw Error("enhance: require 0 < overlap < block_size and block_size >= 4");
        if (!(energy_threshold_percentile > 0 && energy_threshold_percentile < 1))
            throw Error("enhance: energy percentile must lie in (0, 1)");
        if (!(radial_bandwidth > 0) || !(angular_bandwidth_base > 0))
            throw Error("enhance: filter bandwidths must be positive");
    }
};

/// Foreground mask: 1 where the fingerprint is recoverable.
using RegionMask = BinaryImage;

struct EnhanceResult {
    GrayImage image;
    RegionMask mask;
    OrientationField orientation; // smoothed, one angle per analysis block (stride spacing)
    std::vector<double> frequency; // dominant ridge frequency per block, cycles/pixel
    std::vector<double> coherence; // per block, in [0, 1]
};

namespace detail {

class Fft2 {
public:
    explicit Fft2(int n)
        : n_(n),
          buf_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n * n))))
    {
        if (!buf_)
            throw std::bad_alloc();
        forward_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2()
    {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buf_);
    }
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(buf_); }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }
    int size() const noexcept { return n_; }

private:
    int n_;
    fftw_complex* buf_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

// Linear-interpolated percentile of an unsorted sample.
inline double percentile(std::vector<double> v, double p)
{
    std::sort(v.begin(), v.end());
    if (v.empty())
        return 0.0;
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return v[lo] + t * (v[hi] - v[lo]);
}

inline double raised_cosine(double distance, double half_width) noexcept
{
    if (distance >= half_width)
        return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * distance / half_width));
}

} // namespace detail

/// Contextual enhancement by short-time Fourier analysis.
///
/// Stage 1 takes overlapping blocks of the (mirror-padded) image and records
/// for each a doubled-angle orientation vector, the dominant ridge frequency
/// and the spectral energy. Orientations are smoothed by 3x3 vector averaging,
/// coherence is the ratio |sum v| / sum |v| over the same neighbourhood, and
/// blocks whose log-energy exceeds the chosen percentile form the region mask.
///
/// Stage 2 multiplies each block spectrum by an angular raised-cosine filter
/// centred on the ridge normal (bandwidth widening as coherence falls) and a
/// radial raised-cosine filter centred on the block frequency, inverts, and
/// overlap-adds with a Hann window. Output is rescaled to [0, 255] and every
/// pixel outside the mask is set to 255.
///
/// Not thread-safe with respect to other FFTW planners in the process.
inline EnhanceResult stft_enhance(const GrayImage& img, const EnhanceParams& params = {})
{
    params.validate();
    const int n = params.block_size;
    const int stride = n - params.overlap;
    const int pad = params.overlap;
    const int h = img.height();
    const int w = img.width();
    if (h < n || w < n)
        throw Error("enhance: image smaller than one analysis block");

    auto sample = [&](int r, int c) {
        return static_cast<double>(img(reflect_index(r, h), reflect_index(c, w)));
    };

    const int nbr = (h + 2 * pad - n + stride - 1) / stride + 1;
    const int nbc = (w + 2 * pad - n + stride - 1) / stride + 1;
    const std::size_t nblocks = static_cast<std::size_t>(nbr) * static_cast<std::size_t>(nbc);

    // Sobel gradients on the mirrored image, evaluated lazily per block.
    auto grad = [&](int r, int c, double& gx, double& gy) {
        auto p = [&](int dr, int dc) { return sample(r + dr, c + dc); };
        gx = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        gy = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
    };

    detail::Fft2 fft(n);
    auto* buf = fft.data();
    const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);

    std::vector<detail::DoubledVector> vec(nblocks);
    std::vector<double> freq(nblocks, 0.0);
    std::vector<double> log_energy(nblocks, 0.0);
    std::vector<double> energy(nblocks, 0.0);
    std::vector<std::vector<std::complex<double>>> spectra(nblocks);

    const int kmin = static_cast<int>(std::ceil(params.min_frequency * n - 1e-9));
    const int kmax = static_cast<int>(std::floor(params.max_frequency * n + 1e-9));
    const int kbins = n; // radial bins 0..n-1

    auto signed_freq = [n](int k) { return k < (n + 1) / 2 ? k : k - n; };

    // Stage 1: per-block analysis.
    for (int bi = 0; bi < nbr; ++bi) {
        for (int bj = 0; bj < nbc; ++bj) {
            const std::size_t b = static_cast<std::size_t>(bi * nbc + bj);
            const int y0 = bi * stride - pad;
            const int x0 = bj * stride - pad;
            double mean = 0.0;
            detail::DoubledVector v;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    mean += sample(y0 + r, x0 + c);
                    double gx, gy;
                    grad(y0 + r, x0 + c, gx, gy);
                    const auto d = detail::doubled(gx, gy);
                    v.x += d.x;
                    v.y += d.y;
                }
            vec[b] = v;
            mean /= static_cast<double>(nn);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    buf[r * n + c] = {sample(y0 + r, x0 + c) - mean, 0.0};
            fft.forward();
            spectra[b].assign(buf, buf + nn);

            std::vector<double> radial(static_cast<std::size_t>(kbins), 0.0);
            double e = 0.0;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    const double p = std::norm(buf[r * n + c]);
                    if (r == 0 && c == 0)
                        continue;
                    e += p;
                    const double rad = std::hypot(signed_freq(r), signed_freq(c));
                    const int k = static_cast<int>(std::lround(rad));
                    if (k < kbins)
                        radial[static_cast<std::size_t>(k)] += p;
                }
            energy[b] = e;
            log_energy[b] = std::log(e + 1.0);

            int best = kmin;
            for (int k = kmin; k <= kmax && k < kbins; ++k)
                if (radial[static_cast<std::size_t>(k)] > radial[static_cast<std::size_t>(best)])
                    best = k;
            double refined = best;
            if (best > kmin && best < kmax) {
                const double a = radial[static_cast<std::size_t>(best - 1)];
                const double m = radial[static_cast<std::size_t>(best)];
                const double c = radial[static_cast<std::size_t>(best + 1)];
                const double denom = a - 2.0 * m + c;
                if (denom < 0)
                    refined += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
            }
            freq[b] = refined / n;
        }
    }

    // Smoothed orientation and coherence over 3x3 block neighbourhoods.
    OrientationField smoothed(nbr, nbc, stride);
    std::vector<double> coherence(nblocks, 0.0);
    for (int bi = 0; bi < nbr; ++bi) {
        for (int bj = 0; bj < nbc; ++bj) {
            detail::DoubledVector s;
            double mag = 0.0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int i = bi + di;
                    const int j = bj + dj;
                    if (i < 0 || j < 0 || i >= nbr || j >= nbc)
                        continue;
                    const auto& v = vec[static_cast<std::size_t>(i * nbc + j)];
                    s.x += v.x;
                    s.y += v.y;
                    mag += std::hypot(v.x, v.y);
                }
            const std::size_t b = static_cast<std::size_t>(bi * nbc + bj);
            smoothed.at(bi, bj) = detail::ridge_angle(s);
            coherence[b] = mag > 0 ? std::hypot(s.x, s.y) / mag : 0.0;
        }
    }

    const double threshold = detail::percentile(log_energy, params.energy_threshold_percentile);
    std::vector<std::uint8_t> block_mask(nblocks, 0);
    bool any = false;
    for (std::size_t b = 0; b < nblocks; ++b) {
        block_mask[b] = log_energy[b] > threshold ? 1 : 0;
        any = any || block_mask[b];
    }

    EnhanceResult result;
    result.orientation = smoothed;
    result.frequency = freq;
    result.coherence = coherence;
    if (!any) {
        result.image = img;
        result.mask = RegionMask(w, h, 0);
        return result;
    }

    // Stage 2: directional band-pass filtering and overlap-add.
    std::vector<double> window(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        window[static_cast<std::size_t>(k)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / n));
    FloatImage acc(w, h, 0.0);
    FloatImage wsum(w, h, 0.0);

    for (int bi = 0; bi < nbr; ++bi) {
        for (int bj = 0; bj < nbc; ++bj) {
            const std::size_t b = static_cast<std::size_t>(bi * nbc + bj);
            const double normal = wrap_pi(smoothed.at(bi, bj) + std::numbers::pi / 2);
            const double bw = std::clamp(
                params.angular_bandwidth_base * (1.0 + (1.0 - coherence[b])),
                std::numbers::pi / 16, std::numbers::pi / 2);
            const double f0 = freq[b];
            const auto& spec = spectra[b];
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    const double fr = static_cast<double>(signed_freq(r)) / n;
                    const double fc = static_cast<double>(signed_freq(c)) / n;
                    const double rad = std::hypot(fr, fc);
                    double gain = detail::raised_cosine(std::abs(rad - f0), params.radial_bandwidth);
                    if (gain > 0) {
                        const double alpha = wrap_pi(std::atan2(-fr, fc));
                        double d = std::abs(alpha - normal);
                        d = std::min(d, std::numbers::pi - d);
                        gain *= detail::raised_cosine(d, bw);
                    }
                    buf[r * n + c] = spec[static_cast<std::size_t>(r * n + c)] * gain;
                }
            }
            fft.backward();
            const int y0 = bi * stride - pad;
            const int x0 = bj * stride - pad;
            for (int r = 0; r < n; ++r) {
                const int y = y0 + r;
                if (y < 0 || y >= h)
                    continue;
                for (int c = 0; c < n; ++c) {
                    const int x = x0 + c;
                    if (x < 0 || x >= w)
                        continue;
                    const double wt = window[static_cast<std::size_t>(r)] * window[static_cast<std::size_t>(c)];
                    acc(y, x) += wt * buf[r * n + c].real() / static_cast<double>(nn);
                    wsum(y, x) += wt;
                }
            }
        }
    }

    // Pixel ownership: the block whose centre is nearest.
    auto owner = [&](int y, int x) {
        const int bi = std::clamp(static_cast<int>(std::lround(static_cast<double>(y + pad - n / 2) / stride)), 0, nbr - 1);
        const int bj = std::clamp(static_cast<int>(std::lround(static_cast<double>(x + pad - n / 2) / stride)), 0, nbc - 1);
        return static_cast<std::size_t>(bi * nbc + bj);
    };

    RegionMask mask(w, h, 0);
    double maxabs = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (wsum(y, x) > 0)
                acc(y, x) /= wsum(y, x);
            if (block_mask[owner(y, x)]) {
                mask(y, x) = 1;
                maxabs = std::max(maxabs, std::abs(acc(y, x)));
            }
        }

    GrayImage out(w, h, 255);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask(y, x))
                out(y, x) = maxabs > 0 ? quantize(127.5 + 127.5 * acc(y, x) / maxabs) : 128;
    result.image = std::move(out);
    result.mask = std::move(mask);
    return result;
}

} // namespace minutia
