#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbf {

/// Thrown when an image file is unreadable or not 8-bit grayscale.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major grid of real intensities. Loaded images live in [0,1]; filtered
/// or noisy images may leave that range until they are saved.
class ImageGrid {
public:
    ImageGrid() = default;
    ImageGrid(int width, int height, double fill = 0.0);
    ImageGrid(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double at(int x, int y) const { return data_[index(x, y)]; }
    double& at(int x, int y) { return data_[index(x, y)]; }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    std::span<const double> pixels() const noexcept { return data_; }
    std::span<double> pixels() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    /// Sub-rectangle copy. Throws std::out_of_range if it does not fit.
    ImageGrid crop(int x0, int y0, int w, int h) const;

    bool operator==(const ImageGrid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Reads an 8-bit grayscale PGM (P5) or PNG, mapping [0,255] onto [0,1].
/// The format is detected from the file's magic bytes.
ImageGrid load_image(const std::filesystem::path& path);

/// Clips to [0,1], quantizes with round-half-up on i*255 and writes P5 PGM or
/// 8-bit grayscale PNG depending on the extension (.png, anything else = PGM).
void save_image(const ImageGrid& img, const std::filesystem::path& path);

/// Byte values save_image would write.
std::vector<std::uint8_t> quantize(const ImageGrid& img);

/// Adds i.i.d. zero-mean Gaussian noise. No clipping.
///
/// Samples come from std::mt19937_64 seeded with spec.seed, transformed with
/// the Box-Muller method (two uniforms in (0,1] per pair of normals, 53-bit
/// mantissas). std::normal_distribution is avoided because its output is
/// implementation-defined.
ImageGrid add_white_noise(const ImageGrid& img, const NoiseSpec& spec);

/// 10*log10(sum ref^2 / sum (ref - test)^2). Returns +infinity when the two
/// images are identical.
double snr_db(const ImageGrid& reference, const ImageGrid& test);

/// Noise level whose expected energy puts the image at target_snr dB.
double sigma_for_snr(const ImageGrid& img, double target_snr);

ImageGrid calibrate_noise_to_snr(const ImageGrid& img, double target_snr, std::uint64_t seed);

} // namespace sbf
