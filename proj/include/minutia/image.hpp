#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace minutia {

/// Base class for all domain failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major 2-D pixel buffer. `T` is the pixel type; images are plain values.
template <typename T>
class Image {
public:
    using value_type = T;

    Image() = default;

    Image(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0)
            throw Error("image dimensions must be non-negative");
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Image(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data))
    {
        if (width < 0 || height < 0 ||
            data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw Error("image data length does not match dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
    const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }

    T& at(int row, int col)
    {
        check(row, col);
        return data_[index(row, col)];
    }
    const T& at(int row, int col) const
    {
        check(row, col);
        return data_[index(row, col)];
    }

    bool contains(int row, int col) const noexcept
    {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    /// Value at (row, col), or `outside` when the coordinate is off the image.
    T get_or(int row, int col, T outside) const noexcept
    {
        return contains(row, col) ? data_[index(row, col)] : outside;
    }

    /// Value with coordinates clamped to the nearest edge pixel.
    T clamped(int row, int col) const noexcept
    {
        row = std::clamp(row, 0, height_ - 1);
        col = std::clamp(col, 0, width_ - 1);
        return data_[index(row, col)];
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    /// Copy of the rectangle [row0, row0+h) x [col0, col0+w).
    Image crop(int row0, int col0, int h, int w) const
    {
        if (row0 < 0 || col0 < 0 || h < 0 || w < 0 || row0 + h > height_ || col0 + w > width_)
            throw Error("crop rectangle outside image");
        Image out(w, h);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                out(r, c) = (*this)(row0 + r, col0 + c);
        return out;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int row, int col) const noexcept
    {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    void check(int row, int col) const
    {
        if (!contains(row, col))
            throw std::out_of_range("pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                                    ") outside " + std::to_string(height_) + "x" +
                                    std::to_string(width_) + " image");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using GrayImage = Image<std::uint8_t>;
using BinaryImage = Image<std::uint8_t>; // values restricted to {0, 1}
using FloatImage = Image<double>;

/// Largest side length accepted by the PGM reader.
inline constexpr int kMaxImageSide = 1 << 16;

/// Round half away from zero, then clamp to [0, 255].
inline std::uint8_t quantize(double v) noexcept
{
    if (!(v == v)) // NaN
        return 0;
    const double r = v < 0.0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

inline GrayImage quantize(const FloatImage& img)
{
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = quantize(src[i]);
    return out;
}

inline FloatImage to_float(const GrayImage& img)
{
    FloatImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<double>(src[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Binary PGM (P5)
// ---------------------------------------------------------------------------

namespace detail {

class PgmCursor {
public:
    explicit PgmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments that run to end of line.
    void skip_separators()
    {
        while (pos_ < bytes_.size()) {
            const auto ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r')
                    ++pos_;
            } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' ||
                       ch == '\f') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long long read_uint(const char* what)
    {
        skip_separators();
        if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9')
            throw Error(std::string("malformed PGM header: expected ") + what);
        long long v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > (1LL << 40))
                throw Error(std::string("malformed PGM header: ") + what + " too large");
            ++pos_;
        }
        return v;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance() noexcept { ++pos_; }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }
    std::uint8_t peek() const noexcept { return bytes_[pos_]; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Decodes a binary (P5) graymap with maxval <= 255.
inline GrayImage read_pgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw Error("malformed PGM: magic must be P5");
    detail::PgmCursor cur(bytes.subspan(2));
    const long long width = cur.read_uint("width");
    const long long height = cur.read_uint("height");
    const long long maxval = cur.read_uint("maxval");
    if (width <= 0 || height <= 0)
        throw Error("malformed PGM header: dimensions must be positive");
    if (width > kMaxImageSide || height > kMaxImageSide)
        throw Error("PGM image exceeds maximum supported side of 65536");
    if (maxval <= 0 || maxval > 255)
        throw Error("unsupported PGM maxval " + std::to_string(maxval) + " (must be 1..255)");
    // Exactly one whitespace byte separates the header from the raster.
    if (cur.at_end())
        throw Error("truncated PGM: missing raster");
    const auto sep = cur.peek();
    if (sep != ' ' && sep != '\t' && sep != '\n' && sep != '\r')
        throw Error("malformed PGM header: missing separator before raster");
    cur.advance();

    const std::size_t offset = 2 + cur.pos();
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - offset < count)
        throw Error("truncated PGM: expected " + std::to_string(count) + " pixel bytes, got " +
                    std::to_string(bytes.size() - offset));
    std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
    for (auto v : data)
        if (v > maxval)
            throw Error("PGM pixel value exceeds maxval");
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

inline GrayImage read_pgm(std::string_view bytes)
{
    return read_pgm(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

/// Encodes as "P5\n<w> <h>\n255\n" followed by the raw raster.
inline std::vector<std::uint8_t> write_pgm(const GrayImage& img)
{
    const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                               std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

inline GrayImage read_pgm_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path);
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return read_pgm(std::string_view(bytes));
}

inline void write_pgm_file(const std::string& path, const GrayImage& img)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + path);
    const auto bytes = write_pgm(img);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw Error("write failed for " + path);
}

// ---------------------------------------------------------------------------
// Block grid
// ---------------------------------------------------------------------------

/// Number of whole blocks along each axis after truncating to a multiple of block_size.
struct BlockGrid {
    int rows = 0;
    int cols = 0;
};

inline BlockGrid block_grid(int width, int height, int block_size)
{
    if (block_size <= 0)
        throw Error("block size must be positive");
    return {height / block_size, width / block_size};
}

template <typename T>
BlockGrid block_grid(const Image<T>& img, int block_size)
{
    return block_grid(img.width(), img.height(), block_size);
}

/// Pixels of block (block_row, block_col) in the truncated image.
template <typename T>
Image<T> block_view(const Image<T>& img, int block_row, int block_col, int block_size)
{
    const auto grid = block_grid(img, block_size);
    if (block_row < 0 || block_col < 0 || block_row >= grid.rows || block_col >= grid.cols)
        throw Error("block index (" + std::to_string(block_row) + ", " +
                    std::to_string(block_col) + ") outside " + std::to_string(grid.rows) + "x" +
                    std::to_string(grid.cols) + " block grid");
    return img.crop(block_row * block_size, block_col * block_size, block_size, block_size);
}

} // namespace minutia
