#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"

using namespace minutia;

namespace {

double angle_gap(double a, double b)
{
    const double d = std::abs(a - b);
    return std::min(d, std::numbers::pi - d);
}

void expect_interior_orientation(const GrayImage& img, double want, double tol)
{
    const auto f = orientation_field(img, 16);
    for (int i = 1; i + 1 < f.rows; ++i)
        for (int j = 1; j + 1 < f.cols; ++j)
            EXPECT_LE(angle_gap(f.at(i, j), want), tol) << "block " << i << "," << j;
}

GrayImage inverted(const GrayImage& img)
{
    GrayImage out = img;
    for (auto& v : out.pixels())
        v = static_cast<std::uint8_t>(255 - v);
    return out;
}

} // namespace

TEST(Orientation, HorizontalStripes)
{
    expect_interior_orientation(synth::grating(128, 128, 0.0, 8.0, 0.4), 0.0, 0.05);
}

TEST(Orientation, VerticalStripes)
{
    expect_interior_orientation(synth::grating(128, 128, std::numbers::pi / 2, 8.0, 0.4), std::numbers::pi / 2,
                                0.05);
}

TEST(Orientation, ThirtyDegrees)
{
    expect_interior_orientation(synth::grating(128, 128, std::numbers::pi / 6, 9.0, 0.1), std::numbers::pi / 6,
                                0.05);
}

TEST(Orientation, PolarityInvariantAndInRange)
{
    SplitMix64 rng(21);
    for (int n = 0; n < 20; ++n) {
        const auto img = synth::random_fingerprint(96, 96, rng);
        const auto a = orientation_field(img, 16);
        const auto b = orientation_field(inverted(img), 16);
        EXPECT_EQ(a.theta, b.theta);
        for (double t : a.theta) {
            EXPECT_GE(t, 0.0);
            EXPECT_LT(t, std::numbers::pi);
        }
    }
}

TEST(Orientation, TooSmall)
{
    EXPECT_THROW(orientation_field(GrayImage(8, 8, 0), 16), Error);
}

TEST(Enhance, CleanGratingPreserved)
{
    for (double theta : {0.0, 0.5, 1.2, 2.0}) {
        const auto g = synth::grating(256, 256, theta, 9.0, 0.3);
        const auto r = stft_enhance(g);
        ASSERT_GT(morph::count_ones(r.mask), 0u);
        EXPECT_GE(pearson(to_float(g), to_float(r.image), &r.mask), 0.95) << "theta " << theta;
    }
}

TEST(Enhance, NoisyGratingImproved)
{
    const auto clean = synth::grating(256, 256, 0.7, 9.0, 0.3);
    SplitMix64 rng(22);
    GrayImage noisy = clean;
    for (auto& v : noisy.pixels())
        v = quantize(v + 30.0 * rng.normal());
    const auto r = stft_enhance(noisy);
    const double before = pearson(to_float(clean), to_float(noisy), &r.mask);
    const double after = pearson(to_float(clean), to_float(r.image), &r.mask);
    EXPECT_GT(after, before);
}

TEST(Enhance, BlankImageHasEmptyMask)
{
    const auto r = stft_enhance(GrayImage(128, 128, 255));
    EXPECT_EQ(morph::count_ones(r.mask), 0u);
}

TEST(Enhance, Deterministic)
{
    SplitMix64 rng(23);
    const auto img = synth::random_fingerprint(160, 160, rng);
    const auto a = stft_enhance(img);
    const auto b = stft_enhance(img);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.mask, b.mask);
}

TEST(Enhance, OutputShapeAndRange)
{
    SplitMix64 rng(24);
    const auto img = synth::random_fingerprint(150, 170, rng);
    const auto r = stft_enhance(img);
    EXPECT_EQ(r.image.width(), img.width());
    EXPECT_EQ(r.image.height(), img.height());
    EXPECT_EQ(r.mask.width(), img.width());
    for (double t : r.orientation.theta) {
        EXPECT_GE(t, 0.0);
        EXPECT_LT(t, std::numbers::pi);
    }
    for (double c : r.coherence) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0 + 1e-12);
    }
}

TEST(Enhance, RejectsBadInput)
{
    EXPECT_THROW(stft_enhance(GrayImage(16, 16, 100)), Error);
    EnhanceParams p;
    p.overlap = 32;
    EXPECT_THROW(stft_enhance(GrayImage(128, 128, 100), p), Error);
    p = {};
    p.energy_threshold_percentile = 1.5;
    EXPECT_THROW(p.validate(), Error);
}

TEST(Filters, PearsonOracle)
{
    FloatImage a(4, 1, std::vector<double>{1, 2, 3, 4});
    FloatImage b(4, 1, std::vector<double>{2, 4, 6, 8});
    FloatImage c(4, 1, std::vector<double>{4, 3, 2, 1});
    EXPECT_NEAR(pearson(a, b), 1.0, 1e-12);
    EXPECT_NEAR(pearson(a, c), -1.0, 1e-12);
}
