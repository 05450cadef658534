#pragma once

#include "sbf/graph.hpp"
#include "sbf/kernels.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sbf {

/// Largest node count the dense oracle accepts.
inline constexpr std::size_t kMaxDenseNodes = 8192;

/// Full eigendecomposition of the normalized Laplacian of a small graph.
/// Eigenvalues ascending; eigenvector columns follow the same order.
struct DenseSpectrum {
    std::size_t n = 0;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd degree;
};

/// I - D^-1/2 W D^-1/2 as a dense matrix.
Eigen::MatrixXd dense_normalized_laplacian(const BilateralGraph& graph);
/// D^-1 W as a dense matrix.
Eigen::MatrixXd dense_bf_matrix(const BilateralGraph& graph);

DenseSpectrum eigendecompose(const BilateralGraph& graph);

/// U^t x
Signal gft(const DenseSpectrum& spectrum, std::span<const double> x_hat);
/// U x
Signal igft(const DenseSpectrum& spectrum, std::span<const double> x_tilde);

/// U h(Lambda) U^t x_hat for any scalar response (kernel or polynomial).
Signal exact_spectral_filter(const DenseSpectrum& spectrum, const std::function<double(double)>& response,
                             std::span<const double> x_hat);
Signal exact_spectral_filter(const DenseSpectrum& spectrum, const SpectralKernel& kernel,
                             std::span<const double> x_hat);
Signal exact_spectral_filter(const DenseSpectrum& spectrum, const PolyFilter& filter, std::span<const double> x_hat);

struct ResponseSample {
    double lambda;
    double response;
};

/// Pixel-domain linear operator, e.g. one BF pass.
using PixelOperator = std::function<Signal(std::span<const double>)>;

/// h_i = u_i^t D^1/2 A D^-1/2 u_i for every eigenvector, where A is the given
/// pixel-domain operator.
std::vector<ResponseSample> empirical_spectral_response(const BilateralGraph& graph, const DenseSpectrum& spectrum,
                                                        const PixelOperator& op);
/// Response of a single BF pass; equals 1 - lambda_i.
std::vector<ResponseSample> empirical_spectral_response(const BilateralGraph& graph, const DenseSpectrum& spectrum);

/// E_k = sum_{i<=k} x~_i^2 / sum_i x~_i^2 for k = 1..n.
std::vector<double> energy_compaction(const DenseSpectrum& spectrum, std::span<const double> x_hat);

} // namespace sbf
