#include "sbf/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sbf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 2.0)) {
        throw std::domain_error("lambda " + std::to_string(lambda) + " outside the spectral interval [0, 2]");
    }
}

std::string fmt_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace

Penalty power_penalty(double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw std::invalid_argument("penalty exponent must be positive and finite");
    }
    return Penalty{exponent == 1.0 ? "lambda" : "lambda^" + fmt_number(exponent),
                   [exponent](double lambda) { return std::pow(lambda, exponent); }};
}

SpectralKernel::SpectralKernel(Kind kind) : kind_(std::move(kind)) {}

double SpectralKernel::operator()(double lambda) const {
    return std::visit(
        overloaded{
            [](const kernel::Constant& c) { return c.value; },
            [lambda](const kernel::BfLinear&) { return 1.0 - lambda; },
            [lambda](const kernel::IteratedBf& k) { return std::pow(1.0 - lambda, k.k); },
            [lambda](const kernel::Regularized& r) {
                const double hp = r.penalty(lambda);
                return 1.0 / (1.0 + r.rho * hp * hp);
            },
            [lambda](const kernel::SharpLowpass& s) {
                return 1.0 / (1.0 + std::exp(s.steepness * (lambda - s.cutoff)));
            },
            [lambda](const kernel::Tabulated& t) {
                if (lambda <= t.lambda.front()) return t.value.front();
                if (lambda >= t.lambda.back()) return t.value.back();
                const auto hi = std::upper_bound(t.lambda.begin(), t.lambda.end(), lambda);
                const auto j = static_cast<std::size_t>(hi - t.lambda.begin());
                const double frac = (lambda - t.lambda[j - 1]) / (t.lambda[j] - t.lambda[j - 1]);
                return t.value[j - 1] + frac * (t.value[j] - t.value[j - 1]);
            },
        },
        kind_);
}

std::string SpectralKernel::describe() const {
    return std::visit(
        overloaded{
            [](const kernel::Constant& c) { return "constant(" + fmt_number(c.value) + ")"; },
            [](const kernel::BfLinear&) { return std::string("bf-linear"); },
            [](const kernel::IteratedBf& k) { return "iterated-bf(k=" + std::to_string(k.k) + ")"; },
            [](const kernel::Regularized& r) {
                return "regularized(h_p=" + r.penalty.name + ", rho=" + fmt_number(r.rho) + ")";
            },
            [](const kernel::SharpLowpass& s) {
                return "sharp-lowpass(cutoff=" + fmt_number(s.cutoff) + ", steepness=" + fmt_number(s.steepness) +
                       ")";
            },
            [](const kernel::Tabulated& t) { return "tabulated(" + std::to_string(t.lambda.size()) + " samples)"; },
        },
        kind_);
}

SpectralKernel make_constant_kernel(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("constant kernel value must be finite");
    return SpectralKernel(kernel::Constant{value});
}

SpectralKernel make_bf_kernel() { return SpectralKernel(kernel::BfLinear{}); }

SpectralKernel make_iterated_bf_kernel(int k) {
    if (k < 0) throw std::invalid_argument("iteration count k must be non-negative");
    return SpectralKernel(kernel::IteratedBf{k});
}

SpectralKernel make_regularized_kernel(Penalty penalty, double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive and finite");
    if (!penalty.fn) throw std::invalid_argument("penalty function is empty");
    constexpr int samples = 1001;
    double prev = penalty(0.0);
    for (int i = 0; i < samples; ++i) {
        const double lambda = 2.0 * i / (samples - 1);
        const double v = penalty(lambda);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("penalty " + penalty.name + " is negative or non-finite at lambda=" +
                                        fmt_number(lambda));
        }
        if (v < prev) {
            throw std::invalid_argument("penalty " + penalty.name + " decreases at lambda=" + fmt_number(lambda));
        }
        prev = v;
    }
    return SpectralKernel(kernel::Regularized{std::move(penalty), rho});
}

SpectralKernel make_sharp_lowpass(double cutoff, double steepness) {
    if (!(cutoff > 0.0 && cutoff < 2.0)) throw std::invalid_argument("lowpass cutoff must lie in (0, 2)");
    if (!(steepness > 0.0) || !std::isfinite(steepness)) {
        throw std::invalid_argument("lowpass steepness must be positive and finite");
    }
    return SpectralKernel(kernel::SharpLowpass{cutoff, steepness});
}

SpectralKernel make_tabulated_kernel(std::vector<double> lambda, std::vector<double> value) {
    if (lambda.empty() || lambda.size() != value.size()) {
        throw std::invalid_argument("tabulated kernel needs matching, non-empty lambda and value lists");
    }
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (!std::isfinite(lambda[i]) || !std::isfinite(value[i])) {
            throw std::invalid_argument("tabulated kernel samples must be finite");
        }
        if (i > 0 && !(lambda[i] > lambda[i - 1])) {
            throw std::invalid_argument("tabulated kernel lambdas must be strictly increasing");
        }
    }
    return SpectralKernel(kernel::Tabulated{std::move(lambda), std::move(value)});
}

SpectralKernel make_denoise_kernel() { return make_regularized_kernel(power_penalty(1.0), 1.0); }

double eval_kernel(const SpectralKernel& kernel, double lambda) {
    check_lambda(lambda);
    return kernel(lambda);
}

// ---------------------------------------------------------------------------

PolyFilter::PolyFilter(RootsForm roots) : rep_(std::move(roots)) {
    if (!std::isfinite(std::get<RootsForm>(rep_).scale)) throw std::invalid_argument("filter scale must be finite");
    for (const auto& r : std::get<RootsForm>(rep_).roots) {
        if (!std::isfinite(r.re) || !std::isfinite(r.im)) throw std::invalid_argument("filter roots must be finite");
    }
}

PolyFilter::PolyFilter(ChebyshevForm cheb) : rep_(std::move(cheb)) {
    const auto& c = std::get<ChebyshevForm>(rep_).coeffs;
    if (c.empty()) throw std::invalid_argument("Chebyshev filter needs at least one coefficient");
    if (!std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("Chebyshev coefficients must be finite");
    }
}

std::size_t PolyFilter::degree() const {
    if (is_chebyshev()) return chebyshev().coeffs.size() - 1;
    std::size_t k = 0;
    for (const auto& r : roots().roots) k += static_cast<std::size_t>(r.degree());
    return k;
}

double PolyFilter::operator()(double lambda) const {
    if (is_chebyshev()) {
        const auto& c = chebyshev().coeffs;
        const double t = lambda - 1.0;
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = c.size() - 1; j >= 1; --j) {
            const double b0 = c[j] + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return c[0] + t * b1 - b2;
    }
    const auto& rf = roots();
    double p = rf.scale;
    for (const auto& r : rf.roots) {
        if (r.is_pair()) {
            p *= 1.0 - 2.0 * r.re * lambda + (r.re * r.re + r.im * r.im) * lambda * lambda;
        } else {
            p *= 1.0 - r.re * lambda;
        }
    }
    return p;
}

PolyFilter make_roots_filter(double scale, const std::vector<std::complex<double>>& roots) {
    RootsForm form{scale, {}};
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const auto r = roots[i];
        if (r.imag() == 0.0) {
            form.roots.push_back({r.real(), 0.0});
            continue;
        }
        std::size_t mate = roots.size();
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && roots[j] == std::conj(r)) {
                mate = j;
                break;
            }
        }
        if (mate == roots.size()) {
            throw std::invalid_argument("complex root without an exact conjugate partner");
        }
        used[mate] = true;
        form.roots.push_back({r.real(), std::abs(r.imag())});
    }
    return PolyFilter(std::move(form));
}

PolyFilter iterated_bf_filter(int k) {
    if (k < 0) throw std::invalid_argument("iteration count k must be non-negative");
    return PolyFilter(RootsForm{1.0, std::vector<PolyRoot>(static_cast<std::size_t>(k), PolyRoot{1.0, 0.0})});
}

PolyFilter fit_chebyshev(const SpectralKernel& kernel, int degree) {
    if (degree < 0) throw std::invalid_argument("polynomial degree must be non-negative");
    const int nodes = std::max(64, 4 * degree);
    std::vector<double> theta(static_cast<std::size_t>(nodes));
    std::vector<double> f(static_cast<std::size_t>(nodes));
    for (int m = 0; m < nodes; ++m) {
        theta[static_cast<std::size_t>(m)] = std::numbers::pi * (m + 0.5) / nodes;
        f[static_cast<std::size_t>(m)] = kernel(1.0 + std::cos(theta[static_cast<std::size_t>(m)]));
    }
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (int j = 0; j <= degree; ++j) {
        double acc = 0.0;
        for (int m = 0; m < nodes; ++m) {
            acc += f[static_cast<std::size_t>(m)] * std::cos(j * theta[static_cast<std::size_t>(m)]);
        }
        c[static_cast<std::size_t>(j)] = (j == 0 ? 1.0 : 2.0) * acc / nodes;
    }
    return PolyFilter(ChebyshevForm{std::move(c)});
}

double eval_poly(const PolyFilter& filter, double lambda) {
    check_lambda(lambda);
    return filter(lambda);
}

double poly_sup_error(const SpectralKernel& kernel, const PolyFilter& filter, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("sup-norm grid needs at least 2 points");
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double lambda = 2.0 * i / (grid_points - 1);
        worst = std::max(worst, std::abs(kernel(lambda) - filter(lambda)));
    }
    return worst;
}

std::vector<double> chebyshev_multiply(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double half = 0.5 * a[i] * b[j];
            out[i + j] += half;
            out[i > j ? i - j : j - i] += half;
        }
    }
    return out;
}

PolyFilter roots_to_coeffs(const PolyFilter& filter) {
    if (filter.is_chebyshev()) return filter;
    const auto& rf = filter.roots();
    std::vector<double> c{rf.scale};
    for (const auto& r : rf.roots) {
        if (r.is_pair()) {
            // 1 - 2a(1+t) + s(1+t)^2 with t^2 = (T0 + T2)/2
            const double s = r.re * r.re + r.im * r.im;
            c = chebyshev_multiply(c, {1.0 - 2.0 * r.re + 1.5 * s, 2.0 * s - 2.0 * r.re, 0.5 * s});
        } else {
            c = chebyshev_multiply(c, {1.0 - r.re, -r.re});
        }
    }
    return PolyFilter(ChebyshevForm{std::move(c)});
}

// ---------------------------------------------------------------------------
// Kernel spec parsing

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw std::invalid_argument("kernel spec: '" + key + "' expects a number, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& text, const std::string& key) {
    const double v = parse_double(text, key);
    if (v != std::floor(v) || std::abs(v) > 1e6) {
        throw std::invalid_argument("kernel spec: '" + key + "' expects an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

Penalty parse_penalty(const std::string& text) {
    const std::string t = lower(trim(text));
    if (t == "lambda") return power_penalty(1.0);
    if (t == "lambda2" || t == "lambda^2") return power_penalty(2.0);
    if (t.rfind("lambda^", 0) == 0) return power_penalty(parse_double(t.substr(7), "h_p"));
    throw std::invalid_argument("kernel spec: unknown h_p '" + text + "' (use lambda, lambda^2 or lambda^<p>)");
}

// "a", "a+bi", "a-bi"; a conjugate partner is implied for complex entries
std::complex<double> parse_root(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw std::invalid_argument("kernel spec: empty root");
    if (t.back() != 'i') return {parse_double(t, "roots"), 0.0};
    t.pop_back();
    std::size_t split_at = std::string::npos;
    for (std::size_t i = t.size(); i-- > 1;) {
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            split_at = i;
            break;
        }
    }
    if (split_at == std::string::npos) return {0.0, parse_double(t, "roots")};
    const double re = parse_double(t.substr(0, split_at), "roots");
    std::string im_text = t.substr(split_at);
    if (im_text == "+" || im_text == "-") im_text += "1";
    return {re, parse_double(im_text, "roots")};
}

KernelSpec build_spec(const std::map<std::string, std::string>& kv) {
    const auto get = [&kv](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    const auto kind_text = get("kind");
    if (!kind_text) throw std::invalid_argument("kernel spec: missing 'kind'");
    const std::string kind = lower(*kind_text);

    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"constant", {"value"}},
        {"bf", {}},
        {"bf-linear", {}},
        {"iterated-bf", {"k"}},
        {"regularized", {"h_p", "rho"}},
        {"denoise", {"rho"}},
        {"lowpass", {"cutoff", "steepness"}},
        {"sharp-lowpass", {"cutoff", "steepness"}},
        {"tabulated", {"table"}},
        {"roots", {"r0", "roots"}},
    };
    const auto rule = allowed.find(kind);
    if (rule == allowed.end()) throw std::invalid_argument("kernel spec: unknown kind '" + *kind_text + "'");
    for (const auto& [key, value] : kv) {
        if (key == "kind") continue;
        if (std::find(rule->second.begin(), rule->second.end(), key) == rule->second.end()) {
            throw std::invalid_argument("kernel spec: key '" + key + "' does not apply to kind '" + kind + "'");
        }
    }

    KernelSpec spec;
    if (kind == "constant") {
        spec.kernel = make_constant_kernel(get("value") ? parse_double(*get("value"), "value") : 1.0);
    } else if (kind == "bf" || kind == "bf-linear") {
        spec.kernel = make_bf_kernel();
        spec.roots_filter = iterated_bf_filter(1);
    } else if (kind == "iterated-bf") {
        const int k = get("k") ? parse_int(*get("k"), "k") : 1;
        spec.kernel = make_iterated_bf_kernel(k);
        spec.roots_filter = iterated_bf_filter(k);
    } else if (kind == "regularized") {
        const Penalty hp = get("h_p") ? parse_penalty(*get("h_p")) : power_penalty(2.0);
        spec.kernel = make_regularized_kernel(hp, get("rho") ? parse_double(*get("rho"), "rho") : 1.0);
    } else if (kind == "denoise") {
        spec.kernel = make_regularized_kernel(power_penalty(1.0), get("rho") ? parse_double(*get("rho"), "rho") : 1.0);
    } else if (kind == "lowpass" || kind == "sharp-lowpass") {
        spec.kernel = make_sharp_lowpass(get("cutoff") ? parse_double(*get("cutoff"), "cutoff") : 0.2,
                                         get("steepness") ? parse_double(*get("steepness"), "steepness") : 50.0);
    } else if (kind == "tabulated") {
        if (!get("table")) throw std::invalid_argument("kernel spec: tabulated kernel needs 'table'");
        std::vector<double> lam, val;
        for (const auto& pair : split(*get("table"), ';')) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) {
                throw std::invalid_argument("kernel spec: table entry '" + pair + "' is not lambda:value");
            }
            lam.push_back(parse_double(pair.substr(0, colon), "table"));
            val.push_back(parse_double(pair.substr(colon + 1), "table"));
        }
        spec.kernel = make_tabulated_kernel(std::move(lam), std::move(val));
    } else {  // roots
        std::vector<std::complex<double>> roots;
        if (get("roots")) {
            for (const auto& r : split(*get("roots"), ';')) {
                const auto z = parse_root(r);
                roots.push_back(z);
                if (z.imag() != 0.0) roots.push_back(std::conj(z));
            }
        }
        spec.roots_filter = make_roots_filter(get("r0") ? parse_double(*get("r0"), "r0") : 1.0, roots);
    }
    return spec;
}

} // namespace

KernelSpec parse_kernel_spec(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("kernel spec line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
            throw std::invalid_argument("kernel spec: duplicate key '" + key + "'");
        }
    }
    return build_spec(kv);
}

KernelSpec resolve_kernel_argument(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("cannot read kernel file " + arg);
        std::ostringstream text;
        text << in.rdbuf();
        return parse_kernel_spec(text.str());
    }
    if (arg.find('=') == std::string::npos) return parse_kernel_spec("kind = " + arg);
    // inline form: pairs separated by ',' so list values use ';'
    std::string text;
    for (const auto& item : split(arg, ',')) text += item + "\n";
    return parse_kernel_spec(text);
}

} // namespace sbf
