#pragma once

#include "sbf/engine.hpp"
#include "sbf/image.hpp"
#include "sbf/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sbf {

/// One row of a spectral-response table.
struct ResponseRow {
    double lambda;
    double kernel;      ///< target h(lambda)
    double polynomial;  ///< implemented p(lambda)
};

/// (lambda, h, p) on `points` evenly spaced samples of [0,2]. Without a
/// kernel the h column repeats p.
std::vector<ResponseRow> sample_response(const std::optional<SpectralKernel>& kernel, const PolyFilter& filter,
                                         int points = 1001);

/// Header "lambda,h,p", values printed with %.12g.
void write_response_csv(const std::filesystem::path& path, const std::vector<ResponseRow>& rows);
std::vector<ResponseRow> read_response_csv(const std::filesystem::path& path);

/// Formats v with %.12g.
std::string format_g12(double v);
/// SNR with two decimals, or "inf".
std::string format_db(double db);

struct DenoiseConfig {
    GraphParams graph{};                 ///< used for both the BF baseline and the proposed filter
    double target_snr = 20.0;
    std::optional<double> noise_sigma;   ///< overrides target_snr when set
    std::uint64_t seed = 0;
    SpectralKernel kernel = make_denoise_kernel();
    int degree = 5;
};

struct DenoiseResult {
    ImageGrid noisy;
    ImageGrid bf;
    ImageGrid proposed;
    double snr_noisy = 0.0;
    double snr_bf = 0.0;
    double snr_proposed = 0.0;
    PolyFilter filter;

    /// "noisy=<db> bf=<db> proposed=<db>"
    std::string report_line() const;
};

/// Noise to the target SNR, one BF pass, and the Chebyshev approximation of
/// the configured kernel, all on the graph of the noisy image.
DenoiseResult recipe_denoise(const ImageGrid& clean, const DenoiseConfig& config);

struct SegmentConfig {
    GraphParams graph{2.0, 0.05, 0, GraphMode::bilateral};
    int iterations = 20;
    SpectralKernel kernel = make_sharp_lowpass(0.2, 50.0);
    int degree = 20;
};

struct SegmentResult {
    ImageGrid reweighted;  ///< BF iterated with weights recomputed every pass
    ImageGrid fixed;       ///< BF iterated on the graph of the input
    ImageGrid proposed;
    std::vector<ResponseRow> iterated_response;
    std::vector<ResponseRow> proposed_response;
};

SegmentResult recipe_segment_preproc(const ImageGrid& input, const SegmentConfig& config);

} // namespace sbf
