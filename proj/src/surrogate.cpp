#include "beam/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "beam/error.hpp"

namespace beam {

std::string_view to_string(Neighborhood n)
{
    return n == Neighborhood::space ? "space" : "observed";
}

Neighborhood neighborhood_from_string(std::string_view text)
{
    if (text == "space") {
        return Neighborhood::space;
    }
    if (text == "observed") {
        return Neighborhood::observed;
    }
    throw Error(ErrorKind::invalid_argument, "unknown neighborhood '" + std::string(text) + "'");
}

void SurrogateSettings::validate() const
{
    if (k < 1) {
        throw Error(ErrorKind::invalid_argument, "surrogate k must be >= 1");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "surrogate gamma must lie in (0, 1)");
    }
}

double distance2(std::span<const double> a, std::span<const double> b)
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d2 += diff * diff;
    }
    return d2;
}

double distance2(const ParameterSpace& space, GridIndex a, GridIndex b)
{
    std::vector<double> ca(space.dimensions());
    std::vector<double> cb(space.dimensions());
    space.metric_index(a, ca);
    space.metric_index(b, cb);
    return distance2(ca, cb);
}

GridNeighbors::GridNeighbors(const ParameterSpace& space, int k) : to_unit2_(space.metric_to_unit2()), k_(k)
{
    for (std::size_t a = 0; a < space.dimensions(); ++a) {
        cardinality_.push_back(space.axis(a).cardinality());
        stride_.push_back(space.stride(a));
        scale_.push_back(space.metric_scale(a));
        if (cardinality_.back() > 1) {
            start_radius_ = std::min(start_radius_, 1.0 / static_cast<double>(cardinality_.back() - 1));
        }
    }
}

std::vector<GridIndex> GridNeighbors::of(GridIndex query) const
{
    std::vector<GridIndex> out;
    of(query, out);
    return out;
}

void GridNeighbors::of(GridIndex query, std::vector<GridIndex>& out) const
{
    out.clear();
    const std::size_t d = cardinality_.size();
    std::vector<std::uint64_t> center(d);
    std::vector<double> center_metric(d);
    GridIndex rest = query;
    for (std::size_t a = 0; a < d; ++a) {
        center[a] = rest / stride_[a];
        rest %= stride_[a];
        center_metric[a] = static_cast<double>(center[a]) * scale_[a];
    }

    struct Hit {
        double d2;
        GridIndex index;
    };
    const auto worse = [](const Hit& x, const Hit& y) { return closer(x.d2, x.index, y.d2, y.index); };

    std::vector<std::uint64_t> lo(d), hi(d), cur(d);
    std::vector<double> cur_metric(d);
    std::vector<Hit> best;
    double radius = start_radius_;
    for (;;) {
        bool covers_all = true;
        for (std::size_t a = 0; a < d; ++a) {
            const std::uint64_t n = cardinality_[a];
            std::uint64_t w = 0;
            if (n > 1) {
                const double steps = std::ceil(radius * static_cast<double>(n - 1));
                w = steps >= static_cast<double>(n - 1) ? n - 1 : static_cast<std::uint64_t>(steps);
            }
            lo[a] = center[a] >= w ? center[a] - w : 0;
            hi[a] = std::min(n - 1, center[a] + w);
            covers_all = covers_all && lo[a] == 0 && hi[a] == n - 1;
        }

        // Max-heap on (d2, index) keeps the k best hits seen in the box.
        best.clear();
        cur = lo;
        for (std::size_t a = 0; a < d; ++a) {
            cur_metric[a] = static_cast<double>(cur[a]) * scale_[a];
        }
        for (;;) {
            GridIndex index = 0;
            for (std::size_t a = 0; a < d; ++a) {
                index += cur[a] * stride_[a];
            }
            if (index != query) {
                const double d2 = distance2(center_metric, cur_metric);
                if (best.size() < static_cast<std::size_t>(k_)) {
                    best.push_back({d2, index});
                    std::push_heap(best.begin(), best.end(), worse);
                } else if (closer(d2, index, best.front().d2, best.front().index)) {
                    std::pop_heap(best.begin(), best.end(), worse);
                    best.back() = {d2, index};
                    std::push_heap(best.begin(), best.end(), worse);
                }
            }
            bool done = true;
            for (std::size_t a = d; a-- > 0;) {
                if (cur[a] < hi[a]) {
                    ++cur[a];
                    cur_metric[a] = static_cast<double>(cur[a]) * scale_[a];
                    done = false;
                    break;
                }
                cur[a] = lo[a];
                cur_metric[a] = static_cast<double>(cur[a]) * scale_[a];
            }
            if (done) {
                break;
            }
        }

        // Points outside the box are farther than `radius`, so the box result is
        // final once the k-th hit lies within it.
        const bool complete = best.size() == static_cast<std::size_t>(k_) && best.front().d2 * to_unit2_ <= radius * radius;
        if (complete || covers_all) {
            break;
        }
        radius *= 2.0;
    }
    std::sort_heap(best.begin(), best.end(), worse);
    for (const auto& h : best) {
        out.push_back(h.index);
    }
}

Surrogate::Surrogate(ParameterSpace space, SurrogateSettings settings, std::vector<Evidence> evidence)
    : space_(std::move(space)), settings_(settings), evidence_(std::move(evidence)), graph_(space_, settings.k)
{
    settings_.validate();
    const std::size_t d = space_.dimensions();
    labels_.reserve(evidence_.size());
    if (settings_.neighborhood == Neighborhood::observed) {
        coords_.resize(evidence_.size() * d);
    }
    for (std::size_t i = 0; i < evidence_.size(); ++i) {
        const auto& e = evidence_[i];
        if (e.index >= space_.cardinality()) {
            throw Error(ErrorKind::out_of_range, "evidence index " + std::to_string(e.index) + " outside the space");
        }
        if (!(e.label >= 0.0 && e.label <= 1.0)) {
            throw Error(ErrorKind::invalid_argument, "evidence label must lie in [0, 1]");
        }
        if (!labels_.emplace(e.index, e.label).second) {
            throw Error(ErrorKind::duplicate, "evidence index " + std::to_string(e.index) + " appears twice");
        }
        if (!coords_.empty()) {
            space_.metric_index(e.index, std::span<double>(coords_).subspan(i * d, d));
        }
    }
}

Surrogate::Surrogate(ParameterSpace space, SurrogateSettings settings, const Dataset& dataset)
    : Surrogate(std::move(space), settings, dataset.evidence())
{
}

NeighborSummary Surrogate::summarize_observed(std::span<const double> query_coords) const
{
    const std::size_t d = space_.dimensions();
    const std::size_t n = evidence_.size();
    struct Hit {
        double d2;
        GridIndex index;
        double label;
    };
    std::vector<Hit> hits;
    hits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        hits.push_back({distance2(query_coords, std::span<const double>(coords_).subspan(i * d, d)),
                        evidence_[i].index, evidence_[i].label});
    }
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(settings_.k), n);
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(m), hits.end(),
                      [](const Hit& a, const Hit& b) { return closer(a.d2, a.index, b.d2, b.index); });
    NeighborSummary s;
    for (std::size_t j = 0; j < m; ++j) {
        s.positive += hits[j].label;
    }
    s.count = static_cast<std::uint32_t>(m);
    s.full = m == static_cast<std::size_t>(settings_.k);
    if (m > 0) {
        s.kth_distance2 = hits[m - 1].d2;
        s.kth_index = hits[m - 1].index;
        s.kth_label = hits[m - 1].label;
    }
    return s;
}

NeighborSummary Surrogate::summarize(GridIndex query) const
{
    if (settings_.neighborhood == Neighborhood::observed) {
        std::vector<double> q(space_.dimensions());
        space_.metric_index(query, q);
        return summarize_observed(q);
    }
    NeighborSummary s;
    for (GridIndex j : graph_.of(query)) {
        if (const auto it = labels_.find(j); it != labels_.end()) {
            s.positive += it->second;
            ++s.count;
        }
    }
    return s;
}

const double* Surrogate::label(GridIndex index) const
{
    const auto it = labels_.find(index);
    return it == labels_.end() ? nullptr : &it->second;
}

bool Surrogate::enters(const NeighborSummary& summary, GridIndex query, GridIndex x) const
{
    if (settings_.neighborhood == Neighborhood::observed) {
        if (!summary.full) {
            return true;
        }
        return closer(distance2(space_, query, x), x, summary.kth_distance2, summary.kth_index);
    }
    const auto nbrs = graph_.of(query);
    return std::find(nbrs.begin(), nbrs.end(), x) != nbrs.end();
}

double Surrogate::predict_with_hypothetical(Evidence extra, GridIndex query) const
{
    if (observed(extra.index)) {
        throw Error(ErrorKind::duplicate,
                    "hypothetical point " + std::to_string(extra.index) + " is already in the dataset");
    }
    const NeighborSummary s = summarize(query);
    if (enters(s, query, extra.index)) {
        return posterior_with(s, settings_.gamma, extra.label);
    }
    return posterior(s, settings_.gamma);
}

}  // namespace beam
