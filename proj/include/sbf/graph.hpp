#pragma once

#include "sbf/image.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sbf {

using Signal = std::vector<double>;

enum class GraphMode { bilateral, gaussian };

struct GraphParams {
    double sigma_d = 2.0;
    double sigma_r = 0.035;
    int window_radius = 0;  ///< <= 0 selects ceil(2*sigma_d)
    GraphMode mode = GraphMode::bilateral;

    int effective_radius() const;
    void validate() const;
};

/// Square sparse matrix in compressed-row form, column indices sorted per row.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;

    std::size_t nnz() const noexcept { return val.size(); }
    /// Stored value or 0.
    double coeff(std::size_t i, std::size_t j) const;
    /// y = A x. Summation order within a row is fixed by the column order.
    void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Bilateral-filter graph over the pixels of one image: symmetric adjacency
/// with unit self-loops plus the degree vector. Immutable once built.
class BilateralGraph {
public:
    BilateralGraph(CsrMatrix adjacency, GraphParams params, int width, int height);

    std::size_t size() const noexcept { return adjacency_.n; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const GraphParams& params() const noexcept { return params_; }
    const CsrMatrix& adjacency() const noexcept { return adjacency_; }
    std::span<const double> degree() const noexcept { return degree_; }
    std::span<const double> sqrt_degree() const noexcept { return sqrt_degree_; }

    /// D^-1 W x: one bilateral filtering pass.
    Signal apply_bf(std::span<const double> x) const;
    void apply_bf(std::span<const double> x, std::span<double> out) const;

    /// (D - W) x, unnormalized.
    Signal apply_laplacian(std::span<const double> x) const;
    /// x - D^-1 W x.
    Signal apply_randomwalk_laplacian(std::span<const double> x) const;
    /// x - D^-1/2 W D^-1/2 x.
    Signal apply_normalized_laplacian(std::span<const double> x) const;

    /// D^1/2 x
    Signal normalize_signal(std::span<const double> x) const;
    /// D^-1/2 x
    Signal denormalize_signal(std::span<const double> x) const;

private:
    void check_length(std::span<const double> x) const;

    CsrMatrix adjacency_;
    GraphParams params_;
    int width_;
    int height_;
    std::vector<double> degree_;
    std::vector<double> sqrt_degree_;
    std::vector<double> inv_degree_;
    std::vector<double> inv_sqrt_degree_;
};

/// Weight between two pixels under the given parameters. In gaussian mode the
/// intensities are ignored.
double edge_weight(const GraphParams& params, int dx, int dy, double xi, double xj);

/// Builds the graph once from img: every pixel pair inside the square window
/// of radius effective_radius() (clipped at the borders) gets its weight.
BilateralGraph build_graph(const ImageGrid& img, const GraphParams& params);

} // namespace sbf
