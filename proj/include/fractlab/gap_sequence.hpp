#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fractlab/errors.hpp"
#include "fractlab/log_length.hpp"

namespace fractlab {

using Index = std::uint64_t;

/// Largest gap index any model hands out (indices stay below 2^62).
inline constexpr Index kMaxIndex = Index{1} << 62;
inline constexpr int kMaxIndexLevel = 61;

/// Ratios r_1, r_2, ... of a central Cantor set, each in (0, 1/2).
///
/// An explicit prefix may be followed by a constant continuation. Without a
/// continuation the sequence is finite and asking for r_j past the prefix is a
/// configuration error.
class RatioSequence {
public:
    RatioSequence() = default;

    explicit RatioSequence(std::vector<double> prefix, std::optional<double> continuation = std::nullopt,
                           std::optional<double> inf_r = std::nullopt, std::optional<double> sup_r = std::nullopt)
        : prefix_(std::move(prefix)), continuation_(continuation), inf_r_(inf_r), sup_r_(sup_r) {
        for (std::size_t i = 0; i < prefix_.size(); ++i)
            check(prefix_[i], i + 1);
        if (continuation_)
            check(*continuation_, prefix_.size() + 1);
        if (inf_r_ && sup_r_ && *inf_r_ > *sup_r_)
            throw ConfigError("declared inf_r exceeds sup_r");
    }

    static RatioSequence constant(double r) { return RatioSequence({}, r, r, r); }

    double operator()(std::size_t j) const {
        if (j == 0)
            throw RangeError("ratio index starts at 1");
        if (j <= prefix_.size())
            return prefix_[j - 1];
        if (continuation_)
            return *continuation_;
        throw ConfigError("ratio r_" + std::to_string(j) + " is beyond the explicit prefix of length " +
                          std::to_string(prefix_.size()) + " and no continuation was declared");
    }

    bool infinite() const noexcept { return continuation_.has_value(); }
    std::size_t explicit_count() const noexcept { return prefix_.size(); }
    const std::vector<double>& prefix() const noexcept { return prefix_; }
    std::optional<double> continuation() const noexcept { return continuation_; }

    /// Declared bounds, falling back to the bounds observed on the explicit part
    /// when the sequence is infinite (the continuation is constant).
    std::optional<double> inf_r() const {
        if (inf_r_)
            return inf_r_;
        if (!infinite())
            return std::nullopt;
        double m = *continuation_;
        for (double r : prefix_)
            m = std::min(m, r);
        return m;
    }
    std::optional<double> sup_r() const {
        if (sup_r_)
            return sup_r_;
        if (!infinite())
            return std::nullopt;
        double m = *continuation_;
        for (double r : prefix_)
            m = std::max(m, r);
        return m;
    }
    bool has_declared_bounds() const noexcept { return inf_r_.has_value() && sup_r_.has_value(); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["ratios"] = prefix_;
        if (continuation_)
            j["then"] = *continuation_;
        if (inf_r_)
            j["inf_r"] = *inf_r_;
        if (sup_r_)
            j["sup_r"] = *sup_r_;
        return j;
    }

private:
    static void check(double r, std::size_t j) {
        if (!(r > 0.0 && r < 0.5))
            throw DegeneracyError("ratio r_" + std::to_string(j) + " = " + std::to_string(r) +
                                  " is outside (0, 1/2)");
    }

    std::vector<double> prefix_;
    std::optional<double> continuation_;
    std::optional<double> inf_r_, sup_r_;
};

class LevelModel;

/// A positive, decreasing, summable gap sequence a_1 >= a_2 >= ... given by a
/// rule with exact terms and exact tails.
///
/// Instances are immutable and shared through ModelPtr.
class GapSequenceModel {
public:
    virtual ~GapSequenceModel() = default;

    virtual std::string kind() const = 0;

    /// a_j for j >= 1. Terms past a finite model's end are zero.
    virtual LogLength term(Index j) const = 0;

    /// sum_{j > m} a_j.
    virtual LogLength tail(Index m) const = 0;

    /// a_first + ... + a_last (inclusive, 1-based).
    virtual LogLength block_sum(Index first, Index last) const {
        if (first > last)
            return LogLength::zero();
        if (last - first < 4096) {
            std::vector<LogLength> terms;
            terms.reserve(static_cast<std::size_t>(last - first + 1));
            for (Index j = first; j <= last; ++j)
                terms.push_back(term(j));
            return log_sum(terms);
        }
        return tail(first - 1).minus(tail(last));
    }

    /// Number of terms for a finite model.
    virtual std::optional<Index> size() const { return std::nullopt; }

    /// Scale sequence s_n = 2^-n sum_{j >= 2^n} a_j.
    virtual LogLength scale(int n) const {
        if (n < 0 || n > kMaxIndexLevel)
            throw RangeError("s_" + std::to_string(n) + " needs index 2^" + std::to_string(n) +
                             " beyond the addressable range of a " + kind() + " model");
        return tail((Index{1} << n) - 1).scaled_pow2(-n);
    }

    virtual nlohmann::json describe() const = 0;

    virtual const LevelModel* as_level() const noexcept { return nullptr; }

    /// Largest index with a known term.
    virtual Index max_index() const { return kMaxIndex; }

    LogLength total() const { return tail(0); }

    /// True when a_j >= a_{j+1} > 0 on the checked prefix (finite models may end).
    bool decreasing_on_prefix(Index horizon) const {
        const Index stop = std::min(horizon, max_index());
        const auto n = size();
        LogLength prev = term(1);
        if (prev.is_zero())
            return false;
        for (Index j = 2; j <= stop; ++j) {
            if (n && j > *n)
                break;
            const LogLength cur = term(j);
            if (cur.is_zero() || cur > prev)
                return false;
            prev = cur;
        }
        return true;
    }
};

using ModelPtr = std::shared_ptr<const GapSequenceModel>;

/// a_j = scale * lambda^j.
class GeometricModel final : public GapSequenceModel {
public:
    GeometricModel(double lambda, LogLength scale) : lambda_lg_(std::log2(lambda)), lambda_(lambda), scale_(scale) {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw DomainError("geometric ratio must lie in (0, 1)");
        if (scale.is_zero())
            throw DomainError("geometric scale must be positive");
        // sum_{j > m} lambda^j = lambda^(m+1) / (1 - lambda)
        tail_factor_ = LogLength::from_value(1.0L / (1.0L - lambda));
    }

    std::string kind() const override { return "geometric"; }

    LogLength term(Index j) const override {
        check_index(j);
        return scale_ * LogLength::from_log2(lambda_lg_ * static_cast<double>(j));
    }

    LogLength tail(Index m) const override { return tail_real(static_cast<long double>(m)); }

    LogLength block_sum(Index first, Index last) const override {
        if (first > last)
            return LogLength::zero();
        check_index(first);
        // lambda^first (1 - lambda^count) / (1 - lambda)
        const long double count = static_cast<long double>(last - first + 1);
        const long double head = -std::expm1(static_cast<long double>(lambda_lg_) * count * std::numbers::ln2_v<long double>);
        return scale_ * LogLength::from_log2(lambda_lg_ * static_cast<double>(first)) * LogLength::from_value(head) *
               tail_factor_;
    }

    LogLength scale(int n) const override {
        if (n < 0 || n > 1000)
            throw RangeError("geometric s_n supported for 0 <= n <= 1000");
        return tail_real(std::ldexp(1.0L, n) - 1.0L).scaled_pow2(-n);
    }

    nlohmann::json describe() const override {
        return {{"kind", "geometric"}, {"lambda", lambda_}, {"scale", {{"log2", scale_.log2()}}}};
    }

    double lambda() const noexcept { return lambda_; }

private:
    void check_index(Index j) const {
        if (j == 0 || j > kMaxIndex)
            throw RangeError("gap index out of range");
    }

    LogLength tail_real(long double m) const {
        return scale_ * LogLength::from_log2(static_cast<double>(lambda_lg_ * (m + 1.0L))) * tail_factor_;
    }

    double lambda_lg_;
    double lambda_;
    LogLength scale_;
    LogLength tail_factor_;
};

/// A finite list of gaps; the tail after the last term is exactly zero.
class ExplicitModel final : public GapSequenceModel {
public:
    explicit ExplicitModel(std::vector<LogLength> terms, bool require_decreasing = true) : terms_(std::move(terms)) {
        if (terms_.empty())
            throw ConfigError("explicit model needs at least one term");
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (terms_[i].is_zero())
                throw DomainError("explicit gap a_" + std::to_string(i + 1) + " is not positive");
            if (require_decreasing && i > 0 && terms_[i] > terms_[i - 1])
                throw DomainError("explicit gap sequence is not decreasing at index " + std::to_string(i + 1));
        }
        suffix_.assign(terms_.size() + 1, LogLength::zero());
        // suffix_[m] = sum_{j > m} a_j; summed from the small end
        for (std::size_t m = terms_.size(); m-- > 0;)
            suffix_[m] = suffix_[m + 1] + terms_[m];
    }

    std::string kind() const override { return "explicit"; }

    LogLength term(Index j) const override {
        if (j == 0)
            throw RangeError("gap index starts at 1");
        return j <= terms_.size() ? terms_[j - 1] : LogLength::zero();
    }

    LogLength tail(Index m) const override { return m < terms_.size() ? suffix_[m] : LogLength::zero(); }

    LogLength block_sum(Index first, Index last) const override {
        if (first > last || first > terms_.size())
            return LogLength::zero();
        last = std::min<Index>(last, terms_.size());
        std::vector<LogLength> part(terms_.begin() + static_cast<std::ptrdiff_t>(first - 1),
                                    terms_.begin() + static_cast<std::ptrdiff_t>(last));
        return log_sum(part);
    }

    std::optional<Index> size() const override { return terms_.size(); }
    Index max_index() const override { return terms_.size(); }

    LogLength scale(int n) const override {
        if (n < 0 || n > kMaxIndexLevel)
            throw RangeError("explicit s_n index out of range");
        return tail((Index{1} << n) - 1).scaled_pow2(-n);
    }

    nlohmann::json describe() const override {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : terms_)
            arr.push_back({{"log2", t.log2()}});
        return {{"kind", "explicit"}, {"terms", arr}};
    }

private:
    std::vector<LogLength> terms_;
    std::vector<LogLength> suffix_;
};

/// Rule describing a sequence organised in levels: level l holds count(l)
/// equal gaps of length length(l), listed level after level.
struct LevelRule {
    std::string kind;
    nlohmann::json params;
    std::function<LogLength(int)> length;
    std::function<long double(int)> count;
    /// Last level with known terms; unset means the rule is infinite.
    std::optional<int> last_level;
    /// When set, levels after last_level still carry this much mass in total
    /// (the individual terms are unknown).
    std::function<LogLength(int)> exact_level_tail;
    /// count(l) == 2^l for every level, so s_n = 2^-n * level_tail(n).
    bool dyadic = false;
    /// Upper limit for levels explored when summing tails numerically.
    int summation_cap = 8192;
};

/// Gap sequence defined level by level (central Cantor gaps, level-constant
/// lists, the super-exponential Example sequence, and subsequences built by the
/// constructions).
class LevelModel final : public GapSequenceModel {
public:
    explicit LevelModel(LevelRule rule) : rule_(std::move(rule)) {
        if (!rule_.length || !rule_.count)
            throw ConfigError("level rule needs length and count functions");
        build_index_table();
        build_tail_table();
    }

    std::string kind() const override { return rule_.kind; }
    const LevelModel* as_level() const noexcept override { return this; }

    int indexed_levels() const noexcept { return static_cast<int>(start_.size()); }
    bool dyadic() const noexcept { return rule_.dyadic; }
    std::optional<int> last_level() const noexcept { return rule_.last_level; }
    bool has_opaque_tail() const noexcept { return static_cast<bool>(rule_.exact_level_tail) && rule_.last_level; }

    LogLength level_length(int l) const {
        if (l < 0)
            throw RangeError("negative level");
        if (rule_.last_level && l > *rule_.last_level) {
            if (has_opaque_tail())
                throw RangeError("level " + std::to_string(l) + " lies in the opaque tail of a " + kind() + " model");
            return LogLength::zero();
        }
        if (l < static_cast<int>(len_.size()))
            return len_[static_cast<std::size_t>(l)];
        return rule_.length(l);
    }

    long double level_count(int l) const {
        if (l < 0 || (rule_.last_level && l > *rule_.last_level))
            return 0.0L;
        return rule_.count(l);
    }

    /// First 1-based index of level l.
    Index level_start(int l) const {
        if (l < 0 || l >= indexed_levels())
            throw RangeError("level " + std::to_string(l) + " is not indexable");
        return start_[static_cast<std::size_t>(l)];
    }

    /// Level containing index j.
    int level_of(Index j) const {
        if (j == 0)
            throw RangeError("gap index starts at 1");
        if (j >= end_index_) {
            if (rule_.last_level && !has_opaque_tail() && finite_end_)
                throw RangeError("index " + std::to_string(j) + " is past the end of a finite " + kind() + " model");
            throw RangeError("index " + std::to_string(j) + " is beyond the addressable range of a " + kind() +
                             " model");
        }
        auto it = std::upper_bound(start_.begin(), start_.end(), j);
        return static_cast<int>(it - start_.begin()) - 1;
    }

    /// sum_{m >= l} count(m) * length(m).
    LogLength level_tail(int l) const {
        if (l < 0)
            throw RangeError("negative level");
        if (rule_.exact_level_tail) {
            if (rule_.last_level && l > *rule_.last_level + 1)
                throw RangeError("level tail past the opaque remainder");
            return rule_.exact_level_tail(l);
        }
        if (rule_.last_level && l > *rule_.last_level)
            return LogLength::zero();
        if (l >= tail_valid_)
            throw RangeError("level tail at level " + std::to_string(l) + " exceeds the summation range of a " +
                             kind() + " model");
        return level_tail_[static_cast<std::size_t>(l)];
    }

    LogLength term(Index j) const override {
        if (j == 0)
            throw RangeError("gap index starts at 1");
        if (j >= end_index_ && finite_end_ && !has_opaque_tail())
            return LogLength::zero();
        return len_[static_cast<std::size_t>(level_of(j))];
    }

    LogLength tail(Index m) const override {
        if (m == 0)
            return level_tail(0);
        const Index next = m + 1;
        if (next >= end_index_) {
            if (finite_end_ && next == end_index_)
                return rule_.exact_level_tail ? level_tail(*rule_.last_level + 1) : LogLength::zero();
            if (finite_end_ && !has_opaque_tail())
                return LogLength::zero();
            throw RangeError("tail index " + std::to_string(m) + " out of range for a " + kind() + " model");
        }
        const int l = level_of(next);
        const long double used = static_cast<long double>(next - start_[static_cast<std::size_t>(l)]);
        const LogLength rest_of_level = len_[static_cast<std::size_t>(l)].times(cnt_[static_cast<std::size_t>(l)] - used);
        return rest_of_level + level_tail(l + 1);
    }

    LogLength block_sum(Index first, Index last) const override {
        if (first > last)
            return LogLength::zero();
        if (finite_end_ && !has_opaque_tail())
            last = std::min(last, end_index_ - 1);
        if (first > last)
            return LogLength::zero();
        const int l0 = level_of(first);
        const int l1 = level_of(last);
        if (l0 == l1)
            return len_[static_cast<std::size_t>(l0)].times(static_cast<long double>(last - first + 1));
        std::vector<LogLength> parts;
        for (int l = l0; l <= l1; ++l) {
            const Index lo = std::max(first, start_[static_cast<std::size_t>(l)]);
            const Index hi = std::min(last, start_[static_cast<std::size_t>(l)] +
                                                static_cast<Index>(cnt_[static_cast<std::size_t>(l)]) - 1);
            if (cnt_[static_cast<std::size_t>(l)] > 0 && lo <= hi)
                parts.push_back(len_[static_cast<std::size_t>(l)].times(static_cast<long double>(hi - lo + 1)));
        }
        return log_sum(parts);
    }

    std::optional<Index> size() const override {
        if (finite_end_ && !has_opaque_tail())
            return end_index_ - 1;
        return std::nullopt;
    }

    Index max_index() const override { return end_index_ - 1; }

    LogLength scale(int n) const override {
        if (n < 0)
            throw RangeError("negative scale index");
        if (rule_.dyadic)
            return level_tail(n).scaled_pow2(-n);
        return GapSequenceModel::scale(n);
    }

    nlohmann::json describe() const override {
        nlohmann::json j = rule_.params;
        j["kind"] = rule_.kind;
        return j;
    }

private:
    void build_index_table() {
        Index start = 1;
        const int last = rule_.last_level ? *rule_.last_level : std::numeric_limits<int>::max();
        for (int l = 0; l <= last; ++l) {
            const long double c = rule_.count(l);
            if (c < 0 || c != std::floor(c))
                throw ConfigError("level multiplicity must be a nonnegative integer");
            if (static_cast<long double>(start) + c > static_cast<long double>(kMaxIndex))
                break;
            start_.push_back(start);
            cnt_.push_back(c);
            const LogLength len = rule_.length(l);
            if (c > 0 && len.is_zero())
                throw DomainError("level " + std::to_string(l) + " has zero gap length");
            len_.push_back(len);
            start += static_cast<Index>(c);
        }
        end_index_ = start;
        finite_end_ = rule_.last_level && static_cast<int>(start_.size()) == *rule_.last_level + 1;
    }

    void build_tail_table() {
        if (rule_.exact_level_tail)
            return;
        std::vector<LogLength> mass;
        const int last = rule_.last_level ? *rule_.last_level : rule_.summation_cap;
        double reference = -std::numeric_limits<double>::infinity();
        const int indexed = static_cast<int>(len_.size());
        for (int l = 0; l <= last; ++l) {
            const LogLength len = l < indexed ? len_[static_cast<std::size_t>(l)] : rule_.length(l);
            const LogLength m = len.times(rule_.count(l));
            mass.push_back(m);
            if (l <= indexed && !m.is_zero())
                reference = m.log2();
            // stop once the level masses are negligible next to every level we index
            if (!rule_.last_level && l > indexed + 8 && !m.is_zero() && m.log2() < reference - 200.0)
                break;
            if (!rule_.last_level && l == rule_.summation_cap)
                throw RangeError("level masses of a " + kind() + " model do not decay within the summation cap");
        }
        level_tail_.assign(mass.size() + 1, LogLength::zero());
        for (std::size_t l = mass.size(); l-- > 0;)
            level_tail_[l] = level_tail_[l + 1] + mass[l];
        // the last stretch before the cutoff carries truncation error; keep a margin
        tail_valid_ = rule_.last_level ? static_cast<int>(mass.size()) + 1
                                       : std::max(0, static_cast<int>(mass.size()) - 8);
    }

    LevelRule rule_;
    std::vector<Index> start_;
    std::vector<long double> cnt_;
    std::vector<LogLength> len_;
    std::vector<LogLength> level_tail_;
    Index end_index_ = 1;
    bool finite_end_ = false;
    int tail_valid_ = 0;
};

// Factories ----------------------------------------------------------------

inline ModelPtr make_geometric(double lambda, LogLength scale = LogLength::one()) {
    return std::make_shared<GeometricModel>(lambda, scale);
}

inline ModelPtr make_explicit(std::vector<LogLength> terms, bool require_decreasing = true) {
    return std::make_shared<ExplicitModel>(std::move(terms), require_decreasing);
}

inline ModelPtr make_explicit_values(const std::vector<double>& values, bool require_decreasing = true) {
    std::vector<LogLength> terms;
    terms.reserve(values.size());
    for (double v : values)
        terms.push_back(LogLength::from_value(v));
    return make_explicit(std::move(terms), require_decreasing);
}

/// Level-constant list g_0, ..., g_K with multiplicities 2^k; finite.
inline ModelPtr make_level_constant(std::vector<LogLength> levels) {
    if (levels.empty())
        throw ConfigError("level_constant model needs at least one level");
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] > levels[k - 1])
            throw DomainError("level lengths must be nonincreasing");
    auto shared = std::make_shared<std::vector<LogLength>>(std::move(levels));
    LevelRule rule;
    rule.kind = "level_constant";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : *shared)
        arr.push_back({{"log2", g.log2()}});
    rule.params = {{"levels", arr}};
    rule.length = [shared](int l) { return (*shared)[static_cast<std::size_t>(l)]; };
    rule.count = [](int l) { return std::ldexp(1.0L, l); };
    rule.last_level = static_cast<int>(shared->size()) - 1;
    rule.dyadic = true;
    return std::make_shared<LevelModel>(std::move(rule));
}

/// Gap sequence of the central Cantor set C{r_j}: level l holds 2^l gaps of
/// length r_1...r_l (1 - 2 r_{l+1}).
inline ModelPtr make_from_ratios(const RatioSequence& ratios, int finite_depth = -1) {
    const int cap = ratios.infinite() ? 8192 : static_cast<int>(ratios.explicit_count());
    const int depth = finite_depth >= 0 ? finite_depth : cap;
    if (depth > cap)
        throw ConfigError("requested depth exceeds the explicit ratio prefix");
    if (depth < 1)
        throw ConfigError("ratio sequence must define at least r_1");
    // prod_lg[l] = log2(r_1 ... r_l)
    auto prod_lg = std::make_shared<std::vector<double>>(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int l = 1; l <= depth; ++l)
        (*prod_lg)[static_cast<std::size_t>(l)] = (*prod_lg)[static_cast<std::size_t>(l - 1)] + std::log2(ratios(static_cast<std::size_t>(l)));
    auto rs = std::make_shared<RatioSequence>(ratios);
    LevelRule rule;
    rule.kind = "from_ratios";
    rule.params = ratios.to_json();
    rule.length = [prod_lg, rs, depth](int l) {
        if (l >= depth)
            throw RangeError("central Cantor level " + std::to_string(l) + " needs ratios past r_" + std::to_string(depth));
        const double r_next = (*rs)(static_cast<std::size_t>(l) + 1);
        return LogLength::from_log2((*prod_lg)[static_cast<std::size_t>(l)] + std::log2(1.0 - 2.0 * r_next));
    };
    rule.count = [](int l) { return std::ldexp(1.0L, l); };
    // telescoping: sum_{m >= l} 2^m r_1..r_m (1 - 2 r_{m+1}) = 2^l r_1..r_l
    rule.exact_level_tail = [prod_lg, depth](int l) {
        if (l > depth)
            throw RangeError("scale index past the available ratios");
        return LogLength::from_log2((*prod_lg)[static_cast<std::size_t>(l)] + l);
    };
    rule.last_level = depth - 1;
    if (ratios.infinite() && finite_depth < 0) {
        // effectively infinite: every addressable level is known
        rule.last_level.reset();
        rule.length = [prod_lg, rs, depth](int l) {
            if (l >= depth)
                throw RangeError("central Cantor level beyond the supported depth");
            const double r_next = (*rs)(static_cast<std::size_t>(l) + 1);
            return LogLength::from_log2((*prod_lg)[static_cast<std::size_t>(l)] + std::log2(1.0 - 2.0 * r_next));
        };
        rule.exact_level_tail = [prod_lg, depth](int l) {
            if (l > depth)
                throw RangeError("scale index past the supported depth");
            return LogLength::from_log2((*prod_lg)[static_cast<std::size_t>(l)] + l);
        };
    }
    rule.dyadic = true;
    return std::make_shared<LevelModel>(std::move(rule));
}

/// log2 g_k for the super-exponential sequence g_0 = 1, g_k = g_{k-1} 2^{-k(k+4)}.
inline double example35_log2(int k) {
    const double kk = k;
    return -(kk * (kk + 1) * (2 * kk + 1) / 6.0 + 2.0 * kk * (kk + 1));
}

/// Level model where level k holds 2^k gaps of length g_k.
inline ModelPtr make_example35(int k_max) {
    if (k_max < 1)
        throw ConfigError("example35 needs K >= 1");
    LevelRule rule;
    rule.kind = "example35";
    rule.params = {{"K", k_max}};
    rule.length = [](int l) { return LogLength::from_log2(example35_log2(l)); };
    rule.count = [](int l) { return std::ldexp(1.0L, l); };
    rule.dyadic = true;
    rule.summation_cap = 4096;
    return std::make_shared<LevelModel>(std::move(rule));
}

/// The classical middle-thirds gap sequence: 2^l gaps of length 3^-(l+1).
inline ModelPtr make_classical_cantor() { return make_from_ratios(RatioSequence::constant(1.0 / 3.0)); }

} // namespace fractlab
