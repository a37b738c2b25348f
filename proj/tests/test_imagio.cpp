#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace minutia;

namespace {

std::string bytes_of(const std::vector<std::uint8_t>& v) { return {v.begin(), v.end()}; }

}

TEST(Pgm, DecodesTwoByTwo)
{
    const std::string file = std::string("P5\n2 2\n255\n") + std::string("\x00\x80\xff\x07", 4);
    const auto img = read_pgm(file);
    ASSERT_EQ(img.width(), 2);
    ASSERT_EQ(img.height(), 2);
    EXPECT_EQ(img(0, 0), 0);
    EXPECT_EQ(img(0, 1), 128);
    EXPECT_EQ(img(1, 0), 255);
    EXPECT_EQ(img(1, 1), 7);
}

TEST(Pgm, EncodesSinglePixel)
{
    EXPECT_EQ(bytes_of(write_pgm(GrayImage(1, 1, 42))), std::string("P5\n1 1\n255\n*"));
}

TEST(Pgm, CommentsBetweenTokens)
{
    const std::string raster("\x01\x02\x03", 3);
    const auto plain = read_pgm("P5\n3 1\n255\n" + raster);
    const auto commented = read_pgm("P5\n# made by hand\n3 # width\n1\n#max\n255\n" + raster);
    EXPECT_EQ(plain, commented);
}

TEST(Pgm, RejectsMalformed)
{
    EXPECT_THROW(read_pgm(std::string("P2\n1 1\n255\n\x01", 12)), Error);
    EXPECT_THROW(read_pgm(std::string("P5\n1 1\n300\n\x01", 12)), Error);
    EXPECT_THROW(read_pgm(std::string("P5\n2 2\n255\n\x01", 12)), Error);
    EXPECT_THROW(read_pgm(std::string("P5\nx 2\n255\n")), Error);
}

TEST(Pgm, RoundTripProperty)
{
    SplitMix64 rng(11);
    for (int n = 0; n < 200; ++n) {
        const auto img = testutil::random_image(rng);
        const auto bytes = write_pgm(img);
        EXPECT_EQ(read_pgm(std::span<const std::uint8_t>(bytes)), img);
        EXPECT_EQ(write_pgm(img), bytes);
    }
}

TEST(Pgm, FileRoundTrip)
{
    SplitMix64 rng(12);
    const auto img = testutil::random_image(rng);
    const auto path = (std::filesystem::temp_directory_path() / "minutia_io_test.pgm").string();
    write_pgm_file(path, img);
    EXPECT_EQ(read_pgm_file(path), img);
    std::filesystem::remove(path);
    EXPECT_THROW(read_pgm_file(path), Error);
}

TEST(Blocks, GridTruncates)
{
    const auto g = block_grid(640, 480, 8);
    EXPECT_EQ(g.rows, 60);
    EXPECT_EQ(g.cols, 80);
    const auto h = block_grid(17, 17, 8);
    EXPECT_EQ(h.rows, 2);
    EXPECT_EQ(h.cols, 2);
    EXPECT_THROW(block_grid(8, 8, 0), Error);
}

TEST(Blocks, ViewIsTopLeft)
{
    SplitMix64 rng(3);
    GrayImage img(20, 19);
    for (auto& v : img.pixels())
        v = static_cast<std::uint8_t>(rng.randint(256));
    EXPECT_EQ(block_view(img, 0, 0, 8), img.crop(0, 0, 8, 8));
    EXPECT_THROW(block_view(img, 2, 0, 8), Error);
    EXPECT_THROW(block_view(img, 0, -1, 8), Error);
}

TEST(Blocks, PartitionProperty)
{
    SplitMix64 rng(4);
    for (int n = 0; n < 50; ++n) {
        const auto img = testutil::random_image(rng, 60);
        const int bs = 1 + static_cast<int>(rng.randint(9));
        const auto g = block_grid(img, bs);
        Image<int> hits(img.width(), img.height(), 0);
        for (int br = 0; br < g.rows; ++br)
            for (int bc = 0; bc < g.cols; ++bc) {
                const auto b = block_view(img, br, bc, bs);
                for (int r = 0; r < bs; ++r)
                    for (int c = 0; c < bs; ++c) {
                        ASSERT_EQ(b(r, c), img(br * bs + r, bc * bs + c));
                        ++hits(br * bs + r, bc * bs + c);
                    }
            }
        for (int r = 0; r < img.height(); ++r)
            for (int c = 0; c < img.width(); ++c)
                EXPECT_EQ(hits(r, c), r < g.rows * bs && c < g.cols * bs ? 1 : 0);
    }
}

TEST(Random, ReferenceVector)
{
    SplitMix64 rng(1234567);
    const std::uint64_t want[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                  4593380528125082431ULL, 16408922859458223821ULL};
    for (auto w : want)
        EXPECT_EQ(rng(), w);
}

TEST(Random, UniformAndRandintRanges)
{
    SplitMix64 rng(9);
    for (int n = 0; n < 10000; ++n) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(rng.randint(7), 7u);
    }
}

TEST(Random, PermutationIsBijection)
{
    SplitMix64 rng(10);
    for (int n = 0; n < 100; ++n) {
        const auto len = static_cast<std::size_t>(rng.randint(300));
        auto p = random_permutation(len, rng);
        std::sort(p.begin(), p.end());
        for (std::size_t k = 0; k < len; ++k)
            ASSERT_EQ(p[k], k);
    }
}

TEST(Quantize, RoundsHalfAwayAndClamps)
{
    EXPECT_EQ(quantize(140.8), 141);
    EXPECT_EQ(quantize(115.2), 115);
    EXPECT_EQ(quantize(2.5), 3);
    EXPECT_EQ(quantize(-4.0), 0);
    EXPECT_EQ(quantize(300.0), 255);
}
