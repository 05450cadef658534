#pragma once

#include "sbf/graph.hpp"
#include "sbf/kernels.hpp"

#include <cstddef>
#include <span>

namespace sbf {

/// Number of sparse D^-1 W applications performed. Pass a pointer to any of
/// the apply functions to have it incremented.
struct ApplyStats {
    std::size_t sparse_passes = 0;
};

enum class Strategy { cascade, chebyshev };

/// Longest root cascade accepted; beyond this the recurrence is the better path.
inline constexpr std::size_t kMaxCascadeDegree = 64;

/// One cascade step: a real root (one pass) or a conjugate pair (two passes).
struct CascadeStage {
    PolyRoot root;
};

/// A polynomial filter bound to a graph. Holds a reference: the graph must
/// outlive the plan.
class FilterPlan {
public:
    FilterPlan(const BilateralGraph& graph, PolyFilter filter, Strategy strategy);

    const BilateralGraph& graph() const noexcept { return *graph_; }
    const PolyFilter& filter() const noexcept { return filter_; }
    Strategy strategy() const noexcept { return strategy_; }
    /// Empty for the recurrence strategy.
    const std::vector<CascadeStage>& stages() const noexcept { return stages_; }

    Signal apply(std::span<const double> x, ApplyStats* stats = nullptr) const;

private:
    const BilateralGraph* graph_;
    PolyFilter filter_;
    Strategy strategy_;
    std::vector<CascadeStage> stages_;
};

/// (D^-1 W)^k x on the fixed graph.
Signal iterate_bf(const BilateralGraph& graph, std::span<const double> x, int k, ApplyStats* stats = nullptr);

/// (1 - r) x + r D^-1 W x, i.e. (I - r L_r) x.
Signal partial_bf_stage(const BilateralGraph& graph, std::span<const double> x, double r,
                        ApplyStats* stats = nullptr);

/// x - 2a L_r x + (a^2 + b^2) L_r^2 x for the root pair a +- bi.
Signal conjugate_pair_stage(const BilateralGraph& graph, std::span<const double> x, double a, double b,
                            ApplyStats* stats = nullptr);

/// r_0 times the stage composition, stages applied in the order listed.
Signal apply_cascade(const FilterPlan& plan, std::span<const double> x, ApplyStats* stats = nullptr);

/// sum_j c_j T_j(L_r - I) x by the three-term recurrence; one pass per degree.
Signal apply_chebyshev(const BilateralGraph& graph, const PolyFilter& filter, std::span<const double> x,
                       ApplyStats* stats = nullptr);

/// Builds the graph on img, applies the filter with the chosen strategy and
/// reshapes. The output is not clipped.
ImageGrid filter_image(const ImageGrid& img, const GraphParams& params, const PolyFilter& filter,
                       Strategy strategy);

/// Repeated build_graph + apply_bf, so the weights follow the evolving image.
/// Baseline only: this operator has no fixed spectral response.
ImageGrid iterate_bf_reweighted(const ImageGrid& img, const GraphParams& params, int k);

} // namespace sbf
