#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fractlab/gap_sequence.hpp"
#include "fractlab/report.hpp"

namespace fractlab {

/// A set of not-yet-placed gap indices inside one residual interval.
///
/// Tree nodes hold a full binary subtree in heap numbering (root 1, children
/// 2t and 2t+1); tail nodes hold every index >= top.
struct Node {
    enum class Kind { tree, tail } kind = Kind::tree;
    Index top = 1;
    LogLength mass;
};

inline int heap_level(Index t) { return 63 - std::countl_zero(t); }

namespace detail {

// sum over the heap subtree rooted at t of the model's terms
inline LogLength subtree_mass(const GapSequenceModel& m, Index t) {
    if (t > m.max_index())
        return LogLength::zero();
    if (const LevelModel* lm = m.as_level(); lm && lm->dyadic()) {
        const int l = heap_level(t);
        return lm->level_tail(l).scaled_pow2(-l);
    }
    std::vector<LogLength> parts;
    Index first = t, width = 1;
    for (int d = 0; first <= m.max_index(); ++d) {
        const Index last = std::min(first + width - 1, m.max_index());
        const LogLength part = m.block_sum(first, last);
        parts.push_back(part);
        if (!part.is_zero() && d > 2 && part.log2() < parts.front().log2() - 90.0)
            break;
        if (first > (kMaxIndex >> 1))
            break;
        first <<= 1;
        width <<= 1;
    }
    return log_sum(parts);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

inline Node make_tree_node(const GapSequenceModel& m, Index t) {
    return {Node::Kind::tree, t, detail::subtree_mass(m, t)};
}

inline Node make_tail_node(const GapSequenceModel& m, Index first) {
    const LogLength mass = first - 1 >= m.max_index() && m.size() ? LogLength::zero() : m.tail(first - 1);
    return {Node::Kind::tail, first, mass};
}

/// How a region hands its unplaced indices to the two sides of the gap it
/// places next.
struct Router {
    enum class Kind { cantor, decreasing, random, none } kind = Kind::cantor;
    std::uint64_t seed = 0;

    std::string name() const {
        switch (kind) {
        case Kind::cantor: return "cantor";
        case Kind::decreasing: return "decreasing";
        case Kind::random: return "random";
        default: return "none";
        }
    }
};

/// A stretch of the line filled by the gaps of `model` according to `router`.
struct Region {
    ModelPtr model;
    std::vector<Node> forest;
    Router router;
    /// Region index -> index in the arrangement's source sequence (unset when
    /// the region is not a relabelled piece of the source).
    std::function<Index(Index)> to_source;
    /// Rebuilds the region model for another source sequence (used by the
    /// correspondence map); unset for constructed pieces.
    std::function<ModelPtr(const ModelPtr&)> rebind;
    std::string label;

    LogLength mass() const {
        std::vector<LogLength> m;
        for (const auto& n : forest)
            m.push_back(n.mass);
        return log_sum(m);
    }
};

struct FixedGap {
    std::int64_t source_index = -1;
    LogLength length;
};

using Segment = std::variant<FixedGap, Region>;

/// Placement plan for the gaps of `source`, laid out left to right.
struct Arrangement {
    ModelPtr source;
    std::string kind;
    std::vector<Segment> layout;
    nlohmann::json meta = nlohmann::json::object();

    LogLength total() const {
        std::vector<LogLength> m;
        for (const auto& s : layout) {
            if (const auto* g = std::get_if<FixedGap>(&s))
                m.push_back(g->length);
            else
                m.push_back(std::get<Region>(s).mass());
        }
        return log_sum(m);
    }
};

inline Region identity_region(const ModelPtr& model, Node root, Router router) {
    Region r;
    r.model = model;
    if (!root.mass.is_zero())
        r.forest.push_back(root);
    r.router = router;
    r.to_source = [](Index i) { return i; };
    r.rebind = [](const ModelPtr& b) { return b; };
    r.label = router.name();
    return r;
}

inline Arrangement cantor_arrangement(const ModelPtr& a) {
    return {a, "cantor", {identity_region(a, make_tree_node(*a, 1), {Router::Kind::cantor, 0})}};
}

inline Arrangement decreasing_arrangement(const ModelPtr& a) {
    return {a, "decreasing", {identity_region(a, make_tail_node(*a, 1), {Router::Kind::decreasing, 0})}};
}

/// Arbitrary arrangement: at every split the untouched index blocks of the
/// residual are sent left or right by a coin seeded on (seed, block).
inline Arrangement random_arrangement(const ModelPtr& a, std::uint64_t seed) {
    Arrangement arr{a, "random", {identity_region(a, make_tree_node(*a, 1), {Router::Kind::random, seed})}};
    arr.meta["seed"] = seed;
    return arr;
}

/// The source with finitely many indices removed, relabelled 1, 2, ...
class SubsequenceModel final : public GapSequenceModel {
public:
    SubsequenceModel(ModelPtr src, std::vector<Index> removed) : src_(std::move(src)), removed_(std::move(removed)) {
        std::sort(removed_.begin(), removed_.end());
        removed_.erase(std::unique(removed_.begin(), removed_.end()), removed_.end());
    }

    std::string kind() const override { return "subsequence"; }

    Index map(Index i) const {
        Index idx = i;
        for (Index e : removed_) {
            if (e <= idx)
                ++idx;
            else
                break;
        }
        return idx;
    }

    LogLength term(Index j) const override { return src_->term(map(j)); }

    LogLength tail(Index m) const override {
        const Index s = m == 0 ? 0 : map(m);
        LogLength t = src_->tail(s);
        std::vector<LogLength> gone;
        for (Index e : removed_)
            if (e > s)
                gone.push_back(src_->term(e));
        return t.minus(log_sum(gone), 1e-9);
    }

    std::optional<Index> size() const override {
        if (auto n = src_->size())
            return *n - std::min<Index>(*n, removed_.size());
        return std::nullopt;
    }

    Index max_index() const override { return src_->max_index() - removed_.size(); }

    nlohmann::json describe() const override {
        return {{"kind", "subsequence"}, {"source", src_->describe()}, {"removed", removed_}};
    }

private:
    ModelPtr src_;
    std::vector<Index> removed_;
};

/// The gaps `order` placed side by side from 0, followed by the remaining
/// gaps in a region routed by `rest`.
inline Arrangement explicit_order(const ModelPtr& a, const std::vector<Index>& order, Router rest) {
    std::vector<Index> seen(order);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw ArrangementError("explicit order lists an index twice");
    Arrangement arr{a, "explicit_order", {}};
    for (Index i : order) {
        if (i == 0 || (a->size() && i > *a->size()))
            throw ArrangementError("explicit order names index " + std::to_string(i) + " outside the sequence");
        arr.layout.push_back(FixedGap{static_cast<std::int64_t>(i), a->term(i)});
    }
    auto sub = std::make_shared<SubsequenceModel>(a, seen);
    if (sub->size() && *sub->size() == 0)
        return arr;
    const Node root = rest.kind == Router::Kind::decreasing ? make_tail_node(*sub, 1) : make_tree_node(*sub, 1);
    Region r;
    r.model = sub;
    if (!root.mass.is_zero())
        r.forest.push_back(root);
    r.router = rest;
    r.to_source = [sub](Index i) { return sub->map(i); };
    r.rebind = [seen](const ModelPtr& b) -> ModelPtr { return std::make_shared<SubsequenceModel>(b, seen); };
    r.label = "remainder";
    arr.layout.push_back(std::move(r));
    arr.meta["order"] = order;
    arr.meta["rest"] = rest.name();
    return arr;
}

// Approximations ------------------------------------------------------------

struct Residual {
    long double lo = 0, hi = 0;
    LogLength mass;
    LogLength max_gap;  // largest unplaced gap inside; zero for a singleton
    std::vector<Node> forest;
    int segment = -1;
};

struct PlacedGap {
    long double lo = 0, hi = 0;
    LogLength length;
    std::int64_t source_index = -1;
    int segment = -1;
    Index local_index = 0;
};

/// A finite stage of a complementary set. Residuals and gaps are in left to
/// right order; `endpoints` are the sorted distinct gap endpoints plus 0 and L.
struct Approximation {
    std::vector<Residual> residuals;
    std::vector<PlacedGap> gaps;
    std::vector<long double> endpoints;
    LogLength total;
    LogLength floor;
    std::size_t stage = 0;

    long double length() const { return total.value(); }

    LogLength placed_mass() const {
        std::vector<LogLength> m;
        for (const auto& g : gaps)
            m.push_back(g.length);
        return log_sum(m);
    }
    LogLength residual_mass() const {
        std::vector<LogLength> m;
        for (const auto& r : residuals)
            m.push_back(r.mass);
        return log_sum(m);
    }
};

/// Decides whether the residual's largest unplaced gap is placed at this stage.
using SplitPredicate = std::function<bool(const Region&, int segment, Index top)>;

namespace detail {

inline Index forest_top(const std::vector<Node>& f) {
    Index t = std::numeric_limits<Index>::max();
    for (const auto& n : f)
        t = std::min(t, n.top);
    return t;
}

inline void push_children(const GapSequenceModel& m, const Node& n, std::vector<Node>& out_left,
                          std::vector<Node>& out_right) {
    if (n.kind == Node::Kind::tree) {
        if (n.top > (kMaxIndex >> 1))
            throw RangeError("cannot split past index 2^62");
        Node l = make_tree_node(m, 2 * n.top), r = make_tree_node(m, 2 * n.top + 1);
        if (!l.mass.is_zero())
            out_left.push_back(l);
        if (!r.mass.is_zero())
            out_right.push_back(r);
    } else {
        Node t = make_tail_node(m, n.top + 1);
        if (!t.mass.is_zero())
            out_left.push_back(t);
    }
}

// split the forest around its top index
inline void route(const Region& reg, const std::vector<Node>& forest, Index top, std::vector<Node>& left,
                  std::vector<Node>& right) {
    const auto& m = *reg.model;
    switch (reg.router.kind) {
    case Router::Kind::cantor:
    case Router::Kind::decreasing:
        if (forest.size() != 1)
            throw ArrangementError("router expects a single index block");
        push_children(m, forest.front(), left, right);
        return;
    case Router::Kind::random: {
        std::vector<Node> pool;
        for (const auto& n : forest) {
            if (n.top == top)
                push_children(m, n, pool, pool);
            else
                pool.push_back(n);
        }
        for (const auto& n : pool) {
            const std::uint64_t h = splitmix64(reg.router.seed ^ splitmix64(n.top * 0x100000001b3ULL + top));
            (h & 1 ? right : left).push_back(n);
        }
        auto by_top = [](const Node& a, const Node& b) { return a.top < b.top; };
        std::sort(left.begin(), left.end(), by_top);
        std::sort(right.begin(), right.end(), by_top);
        return;
    }
    case Router::Kind::none:
        break;
    }
    throw ArrangementError("no placement rule for index " + std::to_string(top) + " of region '" + reg.label +
                           "'");
}

inline LogLength forest_mass(const std::vector<Node>& f) {
    std::vector<LogLength> m;
    for (const auto& n : f)
        m.push_back(n.mass);
    return log_sum(m);
}

} // namespace detail

/// Refine until `split` declines every residual. Positions are inherited top
/// down, so a gap placed at one stage sits at the same place at every later
/// stage.
inline Approximation refine_with(const Arrangement& arr, const SplitPredicate& split,
                                 std::size_t max_gaps = std::size_t{1} << 26) {
    Approximation ap;
    ap.total = arr.total();

    struct Item {
        bool is_gap;
        Residual res;
        PlacedGap gap;
    };
    // seed with the layout, in reverse so the stack pops left to right
    std::vector<Item> stack;
    {
        std::vector<Item> seeds;
        long double pos = 0;
        for (std::size_t s = 0; s < arr.layout.size(); ++s) {
            const int seg = static_cast<int>(s);
            if (const auto* g = std::get_if<FixedGap>(&arr.layout[s])) {
                PlacedGap pg{pos, pos + g->length.value(), g->length, g->source_index, seg, 0};
                pos = pg.hi;
                seeds.push_back({true, {}, pg});
            } else {
                const Region& reg = std::get<Region>(arr.layout[s]);
                Residual r;
                r.lo = pos;
                r.mass = reg.mass();
                r.hi = s + 1 == arr.layout.size() ? ap.total.value() : pos + r.mass.value();
                r.forest = reg.forest;
                r.segment = seg;
                pos = r.hi;
                seeds.push_back({false, r, {}});
            }
        }
        stack.assign(seeds.rbegin(), seeds.rend());
    }

    while (!stack.empty()) {
        Item it = std::move(stack.back());
        stack.pop_back();
        if (it.is_gap) {
            ap.gaps.push_back(it.gap);
            continue;
        }
        Residual& r = it.res;
        if (r.forest.empty()) {
            r.max_gap = LogLength::zero();
            ap.residuals.push_back(std::move(r));
            continue;
        }
        const Region& reg = std::get<Region>(arr.layout[static_cast<std::size_t>(r.segment)]);
        const Index top = detail::forest_top(r.forest);
        r.max_gap = reg.model->term(top);
        if (!split(reg, r.segment, top)) {
            ap.residuals.push_back(std::move(r));
            continue;
        }
        if (ap.gaps.size() + stack.size() >= max_gaps)
            throw RangeError("refinement exceeds " + std::to_string(max_gaps) + " gaps");
        std::vector<Node> left, right;
        detail::route(reg, r.forest, top, left, right);
        const LogLength mass_left = detail::forest_mass(left);
        const LogLength mass_right = detail::forest_mass(right);
        PlacedGap g;
        g.length = r.max_gap;
        // an empty side means the gap touches the residual's end exactly
        g.lo = mass_left.is_zero() ? r.lo : r.lo + mass_left.value();
        g.hi = mass_right.is_zero() ? r.hi : g.lo + g.length.value();
        g.segment = r.segment;
        g.local_index = top;
        g.source_index = reg.to_source ? static_cast<std::int64_t>(reg.to_source(top)) : -1;
        if (g.length.log2() > r.mass.log2() + 1e-9)
            throw ConstructionError("gap " + std::to_string(top) + " is longer than its host interval");
        Residual lr{r.lo, g.lo, mass_left, {}, std::move(left), r.segment};
        Residual rr{g.hi, std::max(g.hi, r.hi), mass_right, {}, std::move(right), r.segment};
        stack.push_back({false, std::move(rr), {}});
        stack.push_back({true, {}, g});
        stack.push_back({false, std::move(lr), {}});
    }

    ap.stage = ap.gaps.size();
    ap.endpoints.reserve(2 * ap.gaps.size() + 2);
    ap.endpoints.push_back(0.0L);
    for (const auto& g : ap.gaps) {
        ap.endpoints.push_back(g.lo);
        ap.endpoints.push_back(g.hi);
    }
    ap.endpoints.push_back(ap.total.value());
    std::sort(ap.endpoints.begin(), ap.endpoints.end());
    ap.endpoints.erase(std::unique(ap.endpoints.begin(), ap.endpoints.end()), ap.endpoints.end());
    return ap;
}

/// Place every gap of length >= gap_floor.
inline Approximation refine(const Arrangement& arr, LogLength gap_floor) {
    if (gap_floor.is_zero())
        throw ConfigError("gap floor must be positive");
    Approximation ap = refine_with(arr, [gap_floor](const Region& reg, int, Index top) {
        return reg.model->term(top) >= gap_floor;
    });
    ap.floor = gap_floor;
    return ap;
}

/// Step-`depth` approximation of the associated Cantor set C_a: the 2^depth
/// intervals I_j^depth, each holding the indices routed to it.
inline Approximation build_cantor(const ModelPtr& a, int depth) {
    if (depth < 1 || depth > kMaxIndexLevel)
        throw ConfigError("cantor depth must lie in [1, 61]");
    if (!a->decreasing_on_prefix(std::min<Index>((Index{1} << depth), Index{1} << 20)))
        throw ConstructionError("gap sequence is not decreasing; a gap may exceed its host interval");
    const Index limit = Index{1} << depth;
    Approximation ap = refine_with(cantor_arrangement(a), [limit](const Region&, int, Index top) { return top < limit; });
    ap.floor = a->term(limit - 1);
    return ap;
}

/// D_a: points x_j = sum_{i >= j} a_i for j = 1..count and the residual [0, x_count].
struct DecreasingSet {
    std::vector<LogLength> points;
    LogLength remaining;  // mass of [0, x_count]
};

inline DecreasingSet build_decreasing(const GapSequenceModel& a, Index count) {
    if (count < 1)
        throw ConfigError("count must be at least 1");
    DecreasingSet d;
    for (Index j = 1; j <= count; ++j)
        d.points.push_back(a.tail(j - 1));
    d.remaining = d.points.back();
    return d;
}

// Correspondence map ---------------------------------------------------------

struct Correspondence {
    Arrangement image;
    Approximation source_approx;
    Approximation image_approx;
    /// (x, pi(x)) for every placed endpoint, 0 and L included, in order.
    std::vector<std::pair<long double, long double>> pairs;
};

/// Pi(E): the arrangement over b with the same placement, gap n resized from
/// a_n to b_n, refined to the stage where every gap with a_n >= gap_floor is placed.
inline Correspondence correspondence_map(const Arrangement& E, const ModelPtr& b, LogLength gap_floor) {
    Correspondence c;
    c.image.source = b;
    c.image.kind = E.kind;
    c.image.meta = E.meta;
    for (const auto& seg : E.layout) {
        if (const auto* g = std::get_if<FixedGap>(&seg)) {
            if (g->source_index < 1)
                throw ArrangementError("fixed gap without a source index cannot be mapped");
            c.image.layout.push_back(FixedGap{g->source_index, b->term(static_cast<Index>(g->source_index))});
            continue;
        }
        const Region& reg = std::get<Region>(seg);
        if (!reg.rebind)
            throw ArrangementError("region '" + reg.label + "' is not a relabelled piece of the source");
        Region img = reg;
        img.model = reg.rebind(b);
        img.forest.clear();
        for (const auto& n : reg.forest)
            img.forest.push_back(n.kind == Node::Kind::tree ? make_tree_node(*img.model, n.top)
                                                            : make_tail_node(*img.model, n.top));
        c.image.layout.push_back(std::move(img));
    }
    // split on the source lengths in both so the structures match
    auto split = [&E, gap_floor](const Region&, int seg, Index top) {
        return std::get<Region>(E.layout[static_cast<std::size_t>(seg)]).model->term(top) >= gap_floor;
    };
    c.source_approx = refine_with(E, split);
    c.image_approx = refine_with(c.image, split);
    c.source_approx.floor = c.image_approx.floor = gap_floor;
    const auto& sg = c.source_approx.gaps;
    const auto& ig = c.image_approx.gaps;
    if (sg.size() != ig.size())
        throw ArrangementError("source and image stages differ");
    c.pairs.emplace_back(0.0L, 0.0L);
    for (std::size_t i = 0; i < sg.size(); ++i) {
        if (c.pairs.back().first != sg[i].lo)
            c.pairs.emplace_back(sg[i].lo, ig[i].lo);
        c.pairs.emplace_back(sg[i].hi, ig[i].hi);
    }
    const long double L = c.source_approx.total.value();
    if (c.pairs.back().first != L)
        c.pairs.emplace_back(L, c.image_approx.total.value());
    return c;
}

/// Positions of the gaps of each level of a level-constant sequence, read off
/// in left to right order: m_k is the longest run of level-k gaps not
/// separated by a strictly larger gap, the two unbounded sides counting as
/// infinitely long gaps. Smaller gaps do not break a run.
inline std::vector<long double> gap_level_stats(const Approximation& ap, const GapSequenceModel& level_model, int K) {
    const LevelModel* lm = level_model.as_level();
    if (!lm || !lm->dyadic())
        throw DomainError("m_k needs a level-constant gap model");
    std::vector<long double> m;
    for (int k = 1; k <= K; ++k) {
        const LogLength gk = lm->level_length(k);
        long double run = 0, best = 0, seen = 0;
        for (const auto& g : ap.gaps) {
            if (g.length > gk) {
                best = std::max(best, run);
                run = 0;
            } else if (g.length == gk) {
                ++run;
                ++seen;
            }
        }
        best = std::max(best, run);
        if (seen < std::ldexp(1.0L, k))
            throw PreconditionError("level " + std::to_string(k) + " is not fully placed at this stage");
        m.push_back(best);
    }
    return m;
}

inline nlohmann::json approximation_json(const Approximation& ap) {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& r : ap.residuals) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& n : r.forest)
            blocks.push_back((n.kind == Node::Kind::tree ? "tree:" : "tail:") + std::to_string(n.top));
        res.push_back({{"lo", fmt12(r.lo)},
                       {"hi", fmt12(r.hi)},
                       {"mass_log2", fmt12(r.mass.log2())},
                       {"max_gap_log2", fmt12(r.max_gap.log2())},
                       {"unplaced", blocks}});
    }
    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& g : ap.gaps)
        gaps.push_back({{"index", g.source_index},
                        {"lo", fmt12(g.lo)},
                        {"hi", fmt12(g.hi)},
                        {"length_log2", fmt12(g.length.log2())},
                        {"approximate", g.length.log2() < -1000.0}});
    nlohmann::json pts = nlohmann::json::array();
    for (long double e : ap.endpoints)
        pts.push_back(fmt12(e));
    return {{"stage", ap.stage},
            {"total_log2", fmt12(ap.total.log2())},
            {"floor_log2", fmt12(ap.floor.log2())},
            {"residuals", res},
            {"gaps", gaps},
            {"endpoints", pts}};
}

} // namespace fractlab
