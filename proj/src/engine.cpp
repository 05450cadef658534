#include "sbf/engine.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace sbf {

namespace {

void check_length(const BilateralGraph& graph, std::span<const double> x) {
    if (x.size() != graph.size()) {
        throw std::invalid_argument("signal length " + std::to_string(x.size()) + " does not match graph size " +
                                    std::to_string(graph.size()));
    }
}

void count(ApplyStats* stats, std::size_t passes = 1) {
    if (stats) stats->sparse_passes += passes;
}

} // namespace

Signal iterate_bf(const BilateralGraph& graph, std::span<const double> x, int k, ApplyStats* stats) {
    check_length(graph, x);
    if (k < 0) throw std::invalid_argument("iteration count k must be non-negative");
    Signal cur(x.begin(), x.end());
    Signal next(cur.size());
    for (int i = 0; i < k; ++i) {
        graph.apply_bf(cur, next);
        count(stats);
        std::swap(cur, next);
    }
    return cur;
}

Signal partial_bf_stage(const BilateralGraph& graph, std::span<const double> x, double r, ApplyStats* stats) {
    check_length(graph, x);
    Signal out = graph.apply_bf(x);
    count(stats);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - r) * x[i] + r * out[i];
    return out;
}

Signal conjugate_pair_stage(const BilateralGraph& graph, std::span<const double> x, double a, double b,
                            ApplyStats* stats) {
    check_length(graph, x);
    const double s = a * a + b * b;
    Signal lx = graph.apply_randomwalk_laplacian(x);
    Signal llx = graph.apply_randomwalk_laplacian(lx);
    count(stats, 2);
    Signal out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - 2.0 * a * lx[i] + s * llx[i];
    return out;
}

FilterPlan::FilterPlan(const BilateralGraph& graph, PolyFilter filter, Strategy strategy)
    : graph_(&graph), filter_(std::move(filter)), strategy_(strategy) {
    if (strategy_ == Strategy::cascade) {
        if (!filter_.is_roots()) {
            throw std::invalid_argument("cascade strategy needs a filter given by its roots");
        }
        if (filter_.degree() > kMaxCascadeDegree) {
            throw std::invalid_argument("cascade degree " + std::to_string(filter_.degree()) + " exceeds " +
                                        std::to_string(kMaxCascadeDegree) + "; use the Chebyshev recurrence");
        }
        for (const auto& r : filter_.roots().roots) stages_.push_back({r});
    }
}

Signal FilterPlan::apply(std::span<const double> x, ApplyStats* stats) const {
    if (strategy_ == Strategy::cascade) return apply_cascade(*this, x, stats);
    return apply_chebyshev(*graph_, roots_to_coeffs(filter_), x, stats);
}

Signal apply_cascade(const FilterPlan& plan, std::span<const double> x, ApplyStats* stats) {
    if (plan.strategy() != Strategy::cascade) throw std::invalid_argument("plan is not a cascade plan");
    const auto& graph = plan.graph();
    check_length(graph, x);
    Signal cur(x.begin(), x.end());
    for (const auto& stage : plan.stages()) {
        cur = stage.root.is_pair() ? conjugate_pair_stage(graph, cur, stage.root.re, stage.root.im, stats)
                                   : partial_bf_stage(graph, cur, stage.root.re, stats);
    }
    const double scale = plan.filter().roots().scale;
    for (double& v : cur) v *= scale;
    return cur;
}

Signal apply_chebyshev(const BilateralGraph& graph, const PolyFilter& filter, std::span<const double> x,
                       ApplyStats* stats) {
    if (!filter.is_chebyshev()) throw std::invalid_argument("apply_chebyshev needs Chebyshev coefficients");
    check_length(graph, x);
    const auto& c = filter.chebyshev().coeffs;
    const std::size_t n = x.size();

    // (L_r - I) v = -D^-1 W v
    Signal prev(x.begin(), x.end());
    Signal out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c[0] * prev[i];
    if (c.size() == 1) return out;

    Signal cur(n);
    graph.apply_bf(prev, cur);
    count(stats);
    for (std::size_t i = 0; i < n; ++i) {
        cur[i] = -cur[i];
        out[i] += c[1] * cur[i];
    }
    Signal next(n);
    for (std::size_t j = 2; j < c.size(); ++j) {
        graph.apply_bf(cur, next);
        count(stats);
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = -2.0 * next[i] - prev[i];
            out[i] += c[j] * next[i];
        }
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    return out;
}

ImageGrid filter_image(const ImageGrid& img, const GraphParams& params, const PolyFilter& filter,
                       Strategy strategy) {
    const BilateralGraph graph = build_graph(img, params);
    const FilterPlan plan(graph, filter, strategy);
    return ImageGrid(img.width(), img.height(), plan.apply(img.pixels()));
}

ImageGrid iterate_bf_reweighted(const ImageGrid& img, const GraphParams& params, int k) {
    if (k < 0) throw std::invalid_argument("iteration count k must be non-negative");
    ImageGrid cur = img;
    for (int i = 0; i < k; ++i) {
        const BilateralGraph graph = build_graph(cur, params);
        cur = ImageGrid(cur.width(), cur.height(), graph.apply_bf(cur.pixels()));
    }
    return cur;
}

} // namespace sbf
