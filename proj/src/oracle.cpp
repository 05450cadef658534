#include "sbf/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sbf {

namespace {

void check_cap(const BilateralGraph& graph) {
    if (graph.size() > kMaxDenseNodes) {
        throw std::invalid_argument("dense oracle limited to " + std::to_string(kMaxDenseNodes) + " nodes, graph has " +
                                    std::to_string(graph.size()));
    }
}

void check_length(const DenseSpectrum& spectrum, std::span<const double> x) {
    if (x.size() != spectrum.n) {
        throw std::invalid_argument("signal length " + std::to_string(x.size()) + " does not match spectrum size " +
                                    std::to_string(spectrum.n));
    }
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
    return {x.data(), static_cast<Eigen::Index>(x.size())};
}

Signal to_signal(const Eigen::VectorXd& v) { return Signal(v.data(), v.data() + v.size()); }

} // namespace

Eigen::MatrixXd dense_normalized_laplacian(const BilateralGraph& graph) {
    check_cap(graph);
    const auto n = static_cast<Eigen::Index>(graph.size());
    const auto& w = graph.adjacency();
    const auto sd = graph.sqrt_degree();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < graph.size(); ++i) {
        for (std::size_t k = w.row_ptr[i]; k < w.row_ptr[i + 1]; ++k) {
            const std::size_t j = w.col[k];
            lap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= w.val[k] / (sd[i] * sd[j]);
        }
    }
    return lap;
}

Eigen::MatrixXd dense_bf_matrix(const BilateralGraph& graph) {
    check_cap(graph);
    const auto n = static_cast<Eigen::Index>(graph.size());
    const auto& w = graph.adjacency();
    const auto deg = graph.degree();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < graph.size(); ++i) {
        for (std::size_t k = w.row_ptr[i]; k < w.row_ptr[i + 1]; ++k) {
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w.col[k])) = w.val[k] / deg[i];
        }
    }
    return p;
}

DenseSpectrum eigendecompose(const BilateralGraph& graph) {
    const Eigen::MatrixXd lap = dense_normalized_laplacian(graph);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver did not converge");

    const auto n = lap.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&values](Eigen::Index a, Eigen::Index b) {
        return values(a) < values(b);
    });

    DenseSpectrum s;
    s.n = graph.size();
    s.eigenvalues.resize(n);
    s.eigenvectors.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        s.eigenvalues(c) = values(order[static_cast<std::size_t>(c)]);
        s.eigenvectors.col(c) = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    }
    s.degree = as_vector(graph.degree());
    return s;
}

Signal gft(const DenseSpectrum& spectrum, std::span<const double> x_hat) {
    check_length(spectrum, x_hat);
    return to_signal(spectrum.eigenvectors.transpose() * as_vector(x_hat));
}

Signal igft(const DenseSpectrum& spectrum, std::span<const double> x_tilde) {
    check_length(spectrum, x_tilde);
    return to_signal(spectrum.eigenvectors * as_vector(x_tilde));
}

Signal exact_spectral_filter(const DenseSpectrum& spectrum, const std::function<double(double)>& response,
                             std::span<const double> x_hat) {
    check_length(spectrum, x_hat);
    Eigen::VectorXd coeffs = spectrum.eigenvectors.transpose() * as_vector(x_hat);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) *= response(spectrum.eigenvalues(i));
    return to_signal(spectrum.eigenvectors * coeffs);
}

Signal exact_spectral_filter(const DenseSpectrum& spectrum, const SpectralKernel& kernel,
                             std::span<const double> x_hat) {
    return exact_spectral_filter(spectrum, [&kernel](double lambda) { return kernel(lambda); }, x_hat);
}

Signal exact_spectral_filter(const DenseSpectrum& spectrum, const PolyFilter& filter, std::span<const double> x_hat) {
    return exact_spectral_filter(spectrum, [&filter](double lambda) { return filter(lambda); }, x_hat);
}

std::vector<ResponseSample> empirical_spectral_response(const BilateralGraph& graph, const DenseSpectrum& spectrum,
                                                        const PixelOperator& op) {
    check_cap(graph);
    if (spectrum.n != graph.size()) throw std::invalid_argument("spectrum does not belong to this graph");
    const auto sd = graph.sqrt_degree();
    std::vector<ResponseSample> out;
    out.reserve(spectrum.n);
    Signal probe(spectrum.n);
    for (std::size_t c = 0; c < spectrum.n; ++c) {
        const auto u = spectrum.eigenvectors.col(static_cast<Eigen::Index>(c));
        for (std::size_t i = 0; i < spectrum.n; ++i) probe[i] = u(static_cast<Eigen::Index>(i)) / sd[i];
        const Signal image = op(probe);
        double h = 0.0;
        for (std::size_t i = 0; i < spectrum.n; ++i) h += u(static_cast<Eigen::Index>(i)) * sd[i] * image[i];
        out.push_back({spectrum.eigenvalues(static_cast<Eigen::Index>(c)), h});
    }
    return out;
}

std::vector<ResponseSample> empirical_spectral_response(const BilateralGraph& graph, const DenseSpectrum& spectrum) {
    return empirical_spectral_response(graph, spectrum,
                                       [&graph](std::span<const double> x) { return graph.apply_bf(x); });
}

std::vector<double> energy_compaction(const DenseSpectrum& spectrum, std::span<const double> x_hat) {
    const Signal coeffs = gft(spectrum, x_hat);
    double total = 0.0;
    for (double c : coeffs) total += c * c;
    if (!(total > 0.0)) throw std::invalid_argument("energy compaction of a zero signal is undefined");
    std::vector<double> curve(coeffs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        acc += coeffs[k] * coeffs[k];
        curve[k] = acc / total;
    }
    return curve;
}

} // namespace sbf
