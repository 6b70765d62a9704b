#include "beam/constraints.hpp"

#include <algorithm>

#include "beam/error.hpp"

namespace beam {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t resolve(const ParameterSpace& space, const std::string& axis, const char* what)
{
    try {
        return space.axis_position(axis);
    } catch (const Error&) {
        throw Error(ErrorKind::invalid_argument,
                    std::string(what) + " constraint refers to unknown axis '" + axis + "'");
    }
}

}  // namespace

ConstraintSet::ConstraintSet(const ParameterSpace& space, std::vector<Constraint> constraints)
    : constraints_(std::move(constraints))
{
    for (const auto& c : constraints_) {
        std::visit(overloaded{
                       [&](const IntervalBound& b) {
                           if (b.min > b.max) {
                               throw Error(ErrorKind::invalid_argument,
                                           "interval constraint on '" + b.axis + "' has min > max");
                           }
                           const auto a = resolve(space, b.axis, "interval");
                           const double tol = 1e-6 * space.axis(a).step();
                           bounds_.push_back({Bound::Kind::interval, a, 0, b.min - tol, b.max + tol, {}});
                       },
                       [&](const Exclusion& e) {
                           const auto a = resolve(space, e.axis, "exclusion");
                           Bound bound{Bound::Kind::exclusion, a, 0, 0, 0, {}};
                           for (double v : e.values) {
                               const auto& axis = space.axis(a);
                               bound.forbidden.push_back(axis.value(axis.position(v)));
                           }
                           std::sort(bound.forbidden.begin(), bound.forbidden.end());
                           bounds_.push_back(std::move(bound));
                       },
                       [&](const PairRatio& r) {
                           if (r.min_ratio > r.max_ratio) {
                               throw Error(ErrorKind::invalid_argument, "ratio constraint " + r.numerator + "/" +
                                                                            r.denominator + " has min > max");
                           }
                           bounds_.push_back({Bound::Kind::ratio, resolve(space, r.numerator, "ratio"),
                                              resolve(space, r.denominator, "ratio"), r.min_ratio, r.max_ratio,
                                              {}});
                       },
                   },
                   c);
    }
}

bool ConstraintSet::satisfies(const Configuration& config) const
{
    for (const auto& b : bounds_) {
        const double v = config.values[b.axis];
        switch (b.kind) {
        case Bound::Kind::interval:
            if (!(v >= b.lo && v <= b.hi)) {
                return false;
            }
            break;
        case Bound::Kind::exclusion:
            if (std::binary_search(b.forbidden.begin(), b.forbidden.end(), v)) {
                return false;
            }
            break;
        case Bound::Kind::ratio: {
            const double ratio = v / config.values[b.other];
            if (!(ratio >= b.lo && ratio <= b.hi)) {
                return false;
            }
            break;
        }
        }
    }
    return true;
}

bool ConstraintSet::satisfies(const ParameterSpace& space, GridIndex index) const
{
    return bounds_.empty() || satisfies(space.decode(index));
}

}  // namespace beam
