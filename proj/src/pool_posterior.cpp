#include "beam/pool_posterior.hpp"

#include <algorithm>
#include <numeric>

#include "beam/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace beam {

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

constexpr std::uint32_t kLeafSize = 8;

double min_distance2(std::span<const double> x, std::span<const double> lo, std::span<const double> hi)
{
    double d2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        double diff = 0.0;
        if (x[a] < lo[a]) {
            diff = lo[a] - x[a];
        } else if (x[a] > hi[a]) {
            diff = x[a] - hi[a];
        }
        d2 += diff * diff;
    }
    return d2;
}

}  // namespace

PoolGeometry::PoolGeometry(const ParameterSpace& space, std::vector<GridIndex> pool, int k,
                           Neighborhood neighborhood, Execution execution)
    : dims_(space.dimensions()), neighborhood_(neighborhood), indices_(std::move(pool))
{
    if (!std::is_sorted(indices_.begin(), indices_.end()) ||
        std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw Error(ErrorKind::invalid_argument, "candidate pool must be sorted and free of duplicates");
    }
    const std::size_t n = indices_.size();
    coords_.resize(n * dims_);
    for (std::size_t i = 0; i < n; ++i) {
        space.metric_index(indices_[i], std::span<double>(coords_).subspan(i * dims_, dims_));
    }

    if (neighborhood_ == Neighborhood::space) {
        const GridNeighbors graph(space, k);
        std::vector<std::vector<GridIndex>> lists(n);
        const bool parallel = execution == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            graph.of(indices_[static_cast<std::size_t>(i)], lists[static_cast<std::size_t>(i)]);
        }
        graph_offset_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            graph_offset_[i + 1] = graph_offset_[i] + lists[i].size();
        }
        graph_.reserve(graph_offset_[n]);
        reverse_.reserve(graph_offset_[n]);
        for (std::size_t i = 0; i < n; ++i) {
            for (GridIndex j : lists[i]) {
                graph_.push_back(j);
                reverse_.emplace_back(j, static_cast<std::uint32_t>(i));
            }
        }
        std::sort(reverse_.begin(), reverse_.end());
    } else {
        graph_offset_.assign(n + 1, 0);
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0U);
        if (n > 0) {
            build_tree(0, static_cast<std::uint32_t>(n));
        }
    }
}

std::int32_t PoolGeometry::build_tree(std::uint32_t begin, std::uint32_t end)
{
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    box_lo_.resize(box_lo_.size() + dims_, 0.0);
    box_hi_.resize(box_hi_.size() + dims_, 0.0);
    double* lo = box_lo_.data() + static_cast<std::size_t>(id) * dims_;
    double* hi = box_hi_.data() + static_cast<std::size_t>(id) * dims_;
    for (std::size_t a = 0; a < dims_; ++a) {
        lo[a] = hi[a] = coords_[order_[begin] * dims_ + a];
    }
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        for (std::size_t a = 0; a < dims_; ++a) {
            const double v = coords_[order_[i] * dims_ + a];
            lo[a] = std::min(lo[a], v);
            hi[a] = std::max(hi[a], v);
        }
    }
    if (end - begin <= kLeafSize) {
        return id;
    }
    std::size_t axis = 0;
    for (std::size_t a = 1; a < dims_; ++a) {
        if (hi[a] - lo[a] > hi[axis] - lo[axis]) {
            axis = a;
        }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = coords_[a * dims_ + axis];
                         const double cb = coords_[b * dims_ + axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const std::int32_t left = build_tree(begin, mid);
    const std::int32_t right = build_tree(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

std::optional<std::size_t> PoolGeometry::position_of(GridIndex index) const
{
    const auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
    if (it == indices_.end() || *it != index) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - indices_.begin());
}

PoolPosterior::PoolPosterior(const Surrogate& model, std::shared_ptr<const PoolGeometry> geometry,
                             std::vector<char> active, Execution execution)
    : model_(std::make_shared<const Surrogate>(model)), geometry_(std::move(geometry)), active_(std::move(active))
{
    const PoolGeometry& geo = *geometry_;
    const std::size_t n = geo.size();
    if (geo.neighborhood() != model_->settings().neighborhood) {
        throw Error(ErrorKind::invalid_argument, "pool geometry and surrogate disagree on the neighborhood");
    }
    if (active_.empty()) {
        active_.assign(n, 1);
    } else if (active_.size() != n) {
        throw Error(ErrorKind::invalid_argument, "active mask does not match the pool size");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (active_[i] && model_->observed(geo.index(i))) {
            throw Error(ErrorKind::invalid_argument,
                        "pool member " + std::to_string(geo.index(i)) + " is already observed");
        }
    }

    const double gamma = model_->settings().gamma;
    const bool observed_mode = geo.neighborhood() == Neighborhood::observed;
    summaries_.resize(n);
    probability_.resize(n);
    const bool parallel = execution == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
        const auto i = static_cast<std::size_t>(s);
        NeighborSummary summary;
        if (observed_mode) {
            summary = model_->summarize_observed(geo.coords(i));
        } else {
            for (GridIndex j : geo.graph_neighbors(i)) {
                if (const double* label = model_->label(j)) {
                    summary.positive += *label;
                    ++summary.count;
                }
            }
        }
        summaries_[i] = summary;
        probability_[i] = posterior(summary, gamma);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (active_[i]) {
            ranking_.push_back(static_cast<std::uint32_t>(i));
        }
    }
    std::stable_sort(ranking_.begin(), ranking_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return probability_[a] > probability_[b]; });

    everyone_affected_ =
        observed_mode && model_->evidence().size() < static_cast<std::size_t>(model_->settings().k);
    if (everyone_affected_) {
        for (int y = 0; y < 2; ++y) {
            auto& rank = shifted_ranking_[y];
            rank = ranking_;
            std::sort(rank.begin(), rank.end());
            std::stable_sort(rank.begin(), rank.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return shifted(a, y) > shifted(b, y); });
        }
    } else if (observed_mode && !geo.tree().empty()) {
        // Largest k-th neighbor radius below each node, over active members.
        const auto& nodes = geo.tree();
        const auto& order = geo.tree_order();
        node_radius2_.assign(nodes.size(), -1.0);
        for (std::size_t id = nodes.size(); id-- > 0;) {
            const auto& node = nodes[id];
            double r2 = -1.0;
            if (node.left < 0) {
                for (std::uint32_t i = node.begin; i < node.end; ++i) {
                    if (active_[order[i]]) {
                        r2 = std::max(r2, summaries_[order[i]].kth_distance2);
                    }
                }
            } else {
                r2 = std::max(node_radius2_[static_cast<std::size_t>(node.left)],
                              node_radius2_[static_cast<std::size_t>(node.right)]);
            }
            node_radius2_[id] = r2;
        }
    }
}

std::vector<std::uint32_t> PoolPosterior::affected(GridIndex x) const
{
    std::vector<std::uint32_t> out;
    affected(x, out);
    return out;
}

void PoolPosterior::affected(GridIndex x, std::vector<std::uint32_t>& out) const
{
    out.clear();
    const PoolGeometry& geo = *geometry_;
    if (everyone_affected_) {
        for (std::uint32_t i = 0; i < geo.size(); ++i) {
            if (active_[i] && geo.index(i) != x) {
                out.push_back(i);
            }
        }
        return;
    }
    if (geo.neighborhood() == Neighborhood::space) {
        geo.for_each_reverse(x, [&](std::uint32_t c) {
            if (active_[c] && geo.index(c) != x) {
                out.push_back(c);
            }
        });
        std::sort(out.begin(), out.end());
        return;
    }

    if (geo.tree().empty()) {
        return;
    }
    std::vector<double> xc(geo.dimensions());
    if (const auto pos = geo.position_of(x)) {
        const auto c = geo.coords(*pos);
        std::copy(c.begin(), c.end(), xc.begin());
    } else {
        model_->space().metric_index(x, xc);
    }
    const auto& nodes = geo.tree();
    const auto& order = geo.tree_order();
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const auto id = static_cast<std::size_t>(stack.back());
        stack.pop_back();
        if (node_radius2_[id] < 0.0 || min_distance2(xc, geo.node_lo(id), geo.node_hi(id)) > node_radius2_[id]) {
            continue;
        }
        const auto& node = nodes[id];
        if (node.left >= 0) {
            stack.push_back(node.right);
            stack.push_back(node.left);
            continue;
        }
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::uint32_t c = order[i];
            if (!active_[c] || geo.index(c) == x) {
                continue;
            }
            const auto& s = summaries_[c];
            if (closer(distance2(geo.coords(c), xc), x, s.kth_distance2, s.kth_index)) {
                out.push_back(c);
            }
        }
    }
    std::sort(out.begin(), out.end());
}

}  // namespace beam
