#include "sbf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbf {

int GraphParams::effective_radius() const {
    if (window_radius > 0) return window_radius;
    return static_cast<int>(std::ceil(2.0 * sigma_d));
}

void GraphParams::validate() const {
    if (!(sigma_d > 0.0) || !std::isfinite(sigma_d)) {
        throw std::invalid_argument("sigma_d must be positive and finite");
    }
    if (mode == GraphMode::bilateral && (!(sigma_r > 0.0) || !std::isfinite(sigma_r))) {
        throw std::invalid_argument("sigma_r must be positive and finite for a bilateral graph");
    }
    if (effective_radius() < 1) {
        throw std::invalid_argument("window radius must be at least 1");
    }
}

double CsrMatrix::coeff(std::size_t i, std::size_t j) const {
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return val[static_cast<std::size_t>(it - col.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            acc += val[k] * x[col[k]];
        }
        y[i] = acc;
    }
}

double edge_weight(const GraphParams& params, int dx, int dy, double xi, double xj) {
    const double dist2 = static_cast<double>(dx * dx + dy * dy);
    double w = std::exp(-dist2 / (2.0 * params.sigma_d * params.sigma_d));
    if (params.mode == GraphMode::bilateral) {
        const double diff = xi - xj;
        w *= std::exp(-(diff * diff) / (2.0 * params.sigma_r * params.sigma_r));
    }
    return w;
}

BilateralGraph build_graph(const ImageGrid& img, const GraphParams& params) {
    params.validate();
    if (img.empty()) throw std::invalid_argument("cannot build a graph on an empty image");

    const int width = img.width();
    const int height = img.height();
    const int radius = params.effective_radius();
    const auto x = img.pixels();

    CsrMatrix w;
    w.n = img.size();
    w.row_ptr.reserve(w.n + 1);
    w.row_ptr.push_back(0);
    const std::size_t span = static_cast<std::size_t>(2 * radius + 1);
    w.col.reserve(w.n * span * span);
    w.val.reserve(w.n * span * span);

    // Row-major scan of the window keeps column indices sorted within each row.
    for (int py = 0; py < height; ++py) {
        for (int px = 0; px < width; ++px) {
            const std::size_t i = img.index(px, py);
            const int y0 = std::max(0, py - radius), y1 = std::min(height - 1, py + radius);
            const int x0 = std::max(0, px - radius), x1 = std::min(width - 1, px + radius);
            for (int qy = y0; qy <= y1; ++qy) {
                for (int qx = x0; qx <= x1; ++qx) {
                    const std::size_t j = img.index(qx, qy);
                    w.col.push_back(j);
                    w.val.push_back(i == j ? 1.0 : edge_weight(params, qx - px, qy - py, x[i], x[j]));
                }
            }
            w.row_ptr.push_back(w.col.size());
        }
    }
    return BilateralGraph(std::move(w), params, width, height);
}

BilateralGraph::BilateralGraph(CsrMatrix adjacency, GraphParams params, int width, int height)
    : adjacency_(std::move(adjacency)), params_(params), width_(width), height_(height) {
    const std::size_t n = adjacency_.n;
    if (adjacency_.row_ptr.size() != n + 1) {
        throw std::invalid_argument("adjacency row pointer has wrong length");
    }
    degree_.resize(n);
    sqrt_degree_.resize(n);
    inv_degree_.resize(n);
    inv_sqrt_degree_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t k = adjacency_.row_ptr[i]; k < adjacency_.row_ptr[i + 1]; ++k) d += adjacency_.val[k];
        if (!(d > 0.0)) throw std::invalid_argument("graph node " + std::to_string(i) + " has zero degree");
        degree_[i] = d;
        sqrt_degree_[i] = std::sqrt(d);
        inv_degree_[i] = 1.0 / d;
        inv_sqrt_degree_[i] = 1.0 / sqrt_degree_[i];
    }
}

void BilateralGraph::check_length(std::span<const double> x) const {
    if (x.size() != size()) {
        throw std::invalid_argument("signal length " + std::to_string(x.size()) + " does not match graph size " +
                                    std::to_string(size()));
    }
}

void BilateralGraph::apply_bf(std::span<const double> x, std::span<double> out) const {
    check_length(x);
    if (out.size() != size()) throw std::invalid_argument("output length does not match graph size");
    adjacency_.multiply(x, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv_degree_[i];
}

Signal BilateralGraph::apply_bf(std::span<const double> x) const {
    Signal out(size());
    apply_bf(x, out);
    return out;
}

Signal BilateralGraph::apply_laplacian(std::span<const double> x) const {
    check_length(x);
    Signal out(size());
    adjacency_.multiply(x, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = degree_[i] * x[i] - out[i];
    return out;
}

Signal BilateralGraph::apply_randomwalk_laplacian(std::span<const double> x) const {
    Signal out = apply_bf(x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - out[i];
    return out;
}

Signal BilateralGraph::apply_normalized_laplacian(std::span<const double> x) const {
    check_length(x);
    Signal scaled(size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = inv_sqrt_degree_[i] * x[i];
    Signal out(size());
    adjacency_.multiply(scaled, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - inv_sqrt_degree_[i] * out[i];
    return out;
}

Signal BilateralGraph::normalize_signal(std::span<const double> x) const {
    check_length(x);
    Signal out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sqrt_degree_[i] * x[i];
    return out;
}

Signal BilateralGraph::denormalize_signal(std::span<const double> x) const {
    check_length(x);
    Signal out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] / sqrt_degree_[i];
    return out;
}

} // namespace sbf
