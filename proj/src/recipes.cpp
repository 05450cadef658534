#include "sbf/recipes.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbf {

std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_db(double db) {
    if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", db);
    return buf;
}

std::vector<ResponseRow> sample_response(const std::optional<SpectralKernel>& kernel, const PolyFilter& filter,
                                         int points) {
    if (points < 2) throw std::invalid_argument("response table needs at least 2 points");
    std::vector<ResponseRow> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double lambda = 2.0 * i / (points - 1);
        const double p = filter(lambda);
        rows.push_back({lambda, kernel ? (*kernel)(lambda) : p, p});
    }
    return rows;
}

void write_response_csv(const std::filesystem::path& path, const std::vector<ResponseRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "lambda,h,p\n";
    for (const auto& r : rows) {
        out << format_g12(r.lambda) << ',' << format_g12(r.kernel) << ',' << format_g12(r.polynomial) << '\n';
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<ResponseRow> read_response_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line) || line != "lambda,h,p") {
        throw std::runtime_error(path.string() + ": missing 'lambda,h,p' header");
    }
    std::vector<ResponseRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        ResponseRow r{};
        char c1 = 0, c2 = 0;
        if (!(fields >> r.lambda >> c1 >> r.kernel >> c2 >> r.polynomial) || c1 != ',' || c2 != ',') {
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

std::string DenoiseResult::report_line() const {
    return "noisy=" + format_db(snr_noisy) + " bf=" + format_db(snr_bf) + " proposed=" + format_db(snr_proposed);
}

DenoiseResult recipe_denoise(const ImageGrid& clean, const DenoiseConfig& config) {
    const double sigma = config.noise_sigma ? *config.noise_sigma : sigma_for_snr(clean, config.target_snr);
    ImageGrid noisy = add_white_noise(clean, NoiseSpec{sigma, config.seed});

    const BilateralGraph graph = build_graph(noisy, config.graph);
    ImageGrid bf(noisy.width(), noisy.height(), graph.apply_bf(noisy.pixels()));

    PolyFilter filter = fit_chebyshev(config.kernel, config.degree);
    ImageGrid proposed(noisy.width(), noisy.height(), apply_chebyshev(graph, filter, noisy.pixels()));

    const double snr_noisy = snr_db(clean, noisy);
    const double snr_bf = snr_db(clean, bf);
    const double snr_proposed = snr_db(clean, proposed);
    return DenoiseResult{std::move(noisy), std::move(bf),  std::move(proposed), snr_noisy,
                         snr_bf,           snr_proposed,   std::move(filter)};
}

SegmentResult recipe_segment_preproc(const ImageGrid& input, const SegmentConfig& config) {
    if (config.iterations < 0) throw std::invalid_argument("iteration count must be non-negative");
    const BilateralGraph graph = build_graph(input, config.graph);

    SegmentResult out;
    out.reweighted = iterate_bf_reweighted(input, config.graph, config.iterations);
    out.fixed = ImageGrid(input.width(), input.height(), iterate_bf(graph, input.pixels(), config.iterations));

    const PolyFilter proposed = fit_chebyshev(config.kernel, config.degree);
    out.proposed = ImageGrid(input.width(), input.height(), apply_chebyshev(graph, proposed, input.pixels()));

    out.iterated_response =
        sample_response(make_iterated_bf_kernel(config.iterations), iterated_bf_filter(config.iterations));
    out.proposed_response = sample_response(config.kernel, proposed);
    return out;
}

} // namespace sbf
