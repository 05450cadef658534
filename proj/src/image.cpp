#include "sbf/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace sbf {

ImageGrid::ImageGrid(int width, int height, double fill)
    : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw std::invalid_argument("image dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageGrid::ImageGrid(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("image data length does not match width*height");
    }
}

ImageGrid ImageGrid::crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > width_ || y0 + h > height_) {
        std::ostringstream msg;
        msg << "crop " << x0 << ',' << y0 << ',' << w << ',' << h << " outside " << width_ << 'x' << height_
            << " image";
        throw std::out_of_range(msg.str());
    }
    ImageGrid out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = at(x0 + x, y0 + y);
        }
    }
    return out;
}

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    return FilePtr(std::fopen(path.string().c_str(), mode), &std::fclose);
}

ImageGrid from_bytes(int width, int height, const std::vector<std::uint8_t>& bytes) {
    std::vector<double> data(bytes.size());
    std::transform(bytes.begin(), bytes.end(), data.begin(),
                   [](std::uint8_t b) { return static_cast<double>(b) / 255.0; });
    return ImageGrid(width, height, std::move(data));
}

// Netpbm header token, skipping whitespace and '#' comments.
bool read_pnm_token(std::istream& in, std::string& token) {
    token.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    // the single whitespace byte after maxval is consumed here; the raster follows it
    if (c == '#') in.unget();
    return !token.empty();
}

int parse_header_int(std::istream& in, const std::filesystem::path& path, const char* what) {
    std::string token;
    if (!read_pnm_token(in, token)) {
        throw FormatError(path.string() + ": truncated PGM header");
    }
    try {
        std::size_t used = 0;
        const int value = std::stoi(token, &used);
        if (used != token.size() || value <= 0) throw std::invalid_argument(what);
        return value;
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": bad PGM " + what + " '" + token + "'");
    }
}

ImageGrid load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open");
    std::string magic;
    read_pnm_token(in, magic);
    if (magic != "P5") throw FormatError(path.string() + ": only binary PGM (P5) is supported");
    const int width = parse_header_int(in, path, "width");
    const int height = parse_header_int(in, path, "height");
    const int maxval = parse_header_int(in, path, "maxval");
    if (maxval != 255) {
        throw FormatError(path.string() + ": unsupported PGM maxval " + std::to_string(maxval) + " (need 255)");
    }
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw FormatError(path.string() + ": truncated PGM raster");
    }
    return from_bytes(width, height, bytes);
}

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// Everything the longjmp may skip over is a plain pointer or POD.
ImageGrid load_png(const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "rb");
    if (!fp) throw FormatError(path.string() + ": cannot open");

    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!png) throw FormatError("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError("libpng: out of memory");
    }

    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    const char* volatile reject = nullptr;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": " + err);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        reject = "PNG is not single-channel grayscale";
    } else if (bit_depth != 8) {
        reject = "PNG bit depth is not 8";
    } else {
        bytes.resize(static_cast<std::size_t>(width) * height);
        rows.resize(height);
        for (png_uint_32 y = 0; y < height; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * width;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (reject) throw FormatError(path.string() + ": " + reject);
    return from_bytes(static_cast<int>(width), static_cast<int>(height), bytes);
}

bool has_png_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png";
}

void save_pgm(const std::vector<std::uint8_t>& bytes, int width, int height, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void save_png(const std::vector<std::uint8_t>& bytes, int width, int height, const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "wb");
    if (!fp) throw std::runtime_error(path.string() + ": cannot open for writing");

    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!png) throw std::runtime_error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng: out of memory");
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(bytes.data()) + static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error(path.string() + ": " + err);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

ImageGrid load_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw FormatError(path.string() + ": cannot open");
    unsigned char magic[8] = {};
    probe.read(reinterpret_cast<char*>(magic), sizeof magic);
    const auto got = static_cast<std::size_t>(probe.gcount());
    probe.close();

    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return load_png(path);
    if (got >= 2 && magic[0] == 'P') {
        if (magic[1] == '5') return load_pgm(path);
        throw FormatError(path.string() + ": netpbm variant P" + std::string(1, static_cast<char>(magic[1])) +
                          " is not supported (need P5)");
    }
    throw FormatError(path.string() + ": not a PGM or PNG file");
}

std::vector<std::uint8_t> quantize(const ImageGrid& img) {
    std::vector<std::uint8_t> bytes(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), bytes.begin(), [](double v) {
        const double clipped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        return static_cast<std::uint8_t>(std::floor(clipped * 255.0 + 0.5));
    });
    return bytes;
}

void save_image(const ImageGrid& img, const std::filesystem::path& path) {
    const auto bytes = quantize(img);
    if (has_png_extension(path)) {
        save_png(bytes, img.width(), img.height(), path);
    } else {
        save_pgm(bytes, img.width(), img.height(), path);
    }
}

ImageGrid add_white_noise(const ImageGrid& img, const NoiseSpec& spec) {
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
        throw std::invalid_argument("noise sigma must be finite and non-negative");
    }
    std::vector<double> out(img.pixels().begin(), img.pixels().end());
    if (spec.sigma == 0.0) return ImageGrid(img.width(), img.height(), std::move(out));

    std::mt19937_64 rng(spec.seed);
    // uniform in (0,1]: never feeds log(0)
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };
    for (std::size_t i = 0; i < out.size(); i += 2) {
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        out[i] += spec.sigma * radius * std::cos(angle);
        if (i + 1 < out.size()) out[i + 1] += spec.sigma * radius * std::sin(angle);
    }
    return ImageGrid(img.width(), img.height(), std::move(out));
}

double snr_db(const ImageGrid& reference, const ImageGrid& test) {
    if (reference.width() != test.width() || reference.height() != test.height()) {
        throw std::invalid_argument("snr_db: image dimensions differ");
    }
    double signal = 0.0;
    double error = 0.0;
    const auto ref = reference.pixels();
    const auto tst = test.pixels();
    for (std::size_t i = 0; i < ref.size(); ++i) {
        signal += ref[i] * ref[i];
        const double d = ref[i] - tst[i];
        error += d * d;
    }
    if (error == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / error);
}

double sigma_for_snr(const ImageGrid& img, double target_snr) {
    if (!std::isfinite(target_snr)) throw std::invalid_argument("target SNR must be finite");
    double energy = 0.0;
    for (double v : img.pixels()) energy += v * v;
    if (energy == 0.0) throw std::invalid_argument("cannot calibrate noise against an all-zero image");
    const double mean_energy = energy / static_cast<double>(img.size());
    return std::sqrt(mean_energy / std::pow(10.0, target_snr / 10.0));
}

ImageGrid calibrate_noise_to_snr(const ImageGrid& img, double target_snr, std::uint64_t seed) {
    return add_white_noise(img, NoiseSpec{sigma_for_snr(img, target_snr), seed});
}

} // namespace sbf
