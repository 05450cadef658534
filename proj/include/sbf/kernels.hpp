#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sbf {

/// Regularization penalty h_p(lambda) of the denoising kernel.
struct Penalty {
    std::string name;
    std::function<double(double)> fn;

    double operator()(double lambda) const { return fn(lambda); }
};

/// h_p(lambda) = lambda^exponent
Penalty power_penalty(double exponent);

namespace kernel {

struct Constant {
    double value = 1.0;
};
/// h = 1 - lambda
struct BfLinear {};
/// h = (1 - lambda)^k
struct IteratedBf {
    int k = 1;
};
/// h = 1 / (1 + rho * h_p(lambda)^2)
struct Regularized {
    Penalty penalty;
    double rho = 1.0;
};
/// h = 1 / (1 + exp(steepness * (lambda - cutoff)))
struct SharpLowpass {
    double cutoff = 0.2;
    double steepness = 50.0;
};
/// Piecewise-linear through (lambda, h) samples sorted by lambda; flat
/// extension outside the sampled range.
struct Tabulated {
    std::vector<double> lambda;
    std::vector<double> value;
};

} // namespace kernel

/// Spectral response h(lambda) on the Laplacian spectrum [0, 2].
class SpectralKernel {
public:
    using Kind = std::variant<kernel::Constant, kernel::BfLinear, kernel::IteratedBf, kernel::Regularized,
                              kernel::SharpLowpass, kernel::Tabulated>;

    explicit SpectralKernel(Kind kind);

    const Kind& kind() const noexcept { return kind_; }
    /// Evaluation without the range check; used on fitting nodes and grids.
    double operator()(double lambda) const;
    std::string describe() const;

private:
    Kind kind_;
};

SpectralKernel make_constant_kernel(double value);
SpectralKernel make_bf_kernel();
SpectralKernel make_iterated_bf_kernel(int k);
/// 1/(1 + rho h_p^2). Rejects rho <= 0 and penalties that are negative or
/// decreasing on a 1001-point grid over [0,2].
SpectralKernel make_regularized_kernel(Penalty penalty, double rho);
SpectralKernel make_sharp_lowpass(double cutoff, double steepness);
SpectralKernel make_tabulated_kernel(std::vector<double> lambda, std::vector<double> value);

/// The denoising response 1/(1 + lambda^2), i.e. the regularized kernel with
/// h_p(lambda) = lambda and rho = 1.
SpectralKernel make_denoise_kernel();

/// h(lambda) with lambda checked against [0, 2].
double eval_kernel(const SpectralKernel& kernel, double lambda);

/// One factor (1 - r lambda) of a root-form polynomial, or a conjugate pair
/// (1 - (a+bi) lambda)(1 - (a-bi) lambda) stored once.
struct PolyRoot {
    double re = 0.0;
    double im = 0.0;  ///< 0 for a real root; otherwise the pair re +- i*im

    bool is_pair() const noexcept { return im != 0.0; }
    int degree() const noexcept { return is_pair() ? 2 : 1; }
};

struct RootsForm {
    double scale = 1.0;  ///< r_0
    std::vector<PolyRoot> roots;
};

/// Coefficients of sum_j c_j T_j(lambda - 1).
struct ChebyshevForm {
    std::vector<double> coeffs;
};

/// Polynomial spectral response, in product (root) or Chebyshev form.
class PolyFilter {
public:
    PolyFilter(RootsForm roots);
    PolyFilter(ChebyshevForm cheb);

    bool is_roots() const noexcept { return std::holds_alternative<RootsForm>(rep_); }
    bool is_chebyshev() const noexcept { return std::holds_alternative<ChebyshevForm>(rep_); }
    const RootsForm& roots() const { return std::get<RootsForm>(rep_); }
    const ChebyshevForm& chebyshev() const { return std::get<ChebyshevForm>(rep_); }
    std::size_t degree() const;

    /// p(lambda) without the range check.
    double operator()(double lambda) const;

private:
    std::variant<RootsForm, ChebyshevForm> rep_;
};

/// r_0 prod_i (1 - r_i lambda) from a list of complex roots. Complex entries
/// must come in exact conjugate pairs.
PolyFilter make_roots_filter(double scale, const std::vector<std::complex<double>>& roots);

/// Roots form of (1 - lambda)^k.
PolyFilter iterated_bf_filter(int k);

/// Truncated Chebyshev series of kernel on [0,2] via lambda = 1 + t, with
/// coefficients from max(64, 4k) cosine nodes.
PolyFilter fit_chebyshev(const SpectralKernel& kernel, int degree);

/// Clenshaw recurrence for the Chebyshev form; direct product for roots.
double eval_poly(const PolyFilter& filter, double lambda);

/// Max |h - p| over grid_points uniformly spaced samples of [0, 2].
double poly_sup_error(const SpectralKernel& kernel, const PolyFilter& filter, int grid_points);

/// Expands a root-form filter into the Chebyshev basis. Chebyshev input is
/// returned unchanged.
PolyFilter roots_to_coeffs(const PolyFilter& filter);

/// Chebyshev-series product (coefficients in the T_j basis).
std::vector<double> chebyshev_multiply(const std::vector<double>& a, const std::vector<double>& b);

/// Key-value kernel description as read from a file or a --kernel argument.
/// Either a polynomial given by roots or a kernel to be fitted.
struct KernelSpec {
    std::optional<SpectralKernel> kernel;
    std::optional<PolyFilter> roots_filter;  ///< set for kernels with known roots
};

/// Parses "key = value" lines ('#' comments). Keys: kind, k, rho, h_p,
/// cutoff, steepness, table, value, r0, roots.
KernelSpec parse_kernel_spec(const std::string& text);

/// Resolves --kernel: an existing file is parsed, otherwise the argument is
/// a bare kind name ("denoise", "lowpass", ...) or comma-separated key=value
/// pairs ("kind=iterated-bf,k=3").
KernelSpec resolve_kernel_argument(const std::string& arg);

} // namespace sbf
