#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fractlab/constructions.hpp"
#include "fractlab/covering.hpp"
#include "fractlab/dimension.hpp"
#include "fractlab/json_io.hpp"
#include "fractlab/seq_core.hpp"
#include "fractlab/sets.hpp"

using namespace fractlab;
using nlohmann::json;

namespace {

struct Outputs {
    // (path, contents); an empty path means stdout
    std::vector<std::pair<std::string, std::string>> files;
};

void emit(const Outputs& o) {
    for (const auto& [path, text] : o.files) {
        if (path.empty()) {
            std::cout << text;
            continue;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write '" + path + "'");
        f << text;
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

LogLength parse_len_arg(const std::string& s) {
    // "2^-5" is read as a power of two
    if (s.rfind("2^", 0) == 0) {
        try {
            return LogLength::from_log2(std::stod(s.substr(2)));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse length '" + s + "'");
        }
    }
    return parse_length(json(s));
}

Arrangement arrangement_for(const ModelPtr& a, const std::string& kind, std::uint64_t seed) {
    if (kind == "cantor")
        return cantor_arrangement(a);
    if (kind == "decreasing")
        return decreasing_arrangement(a);
    if (kind == "random")
        return random_arrangement(a, seed);
    throw ConfigError("unknown arrangement '" + kind + "'");
}

// the stage holding the 2^depth - 1 largest gaps
Approximation approximate(const ModelPtr& a, const std::string& kind, int depth, std::uint64_t seed) {
    if (depth < 1 || depth > 24)
        throw ConfigError("depth must lie in [1, 24]");
    if (kind == "cantor")
        return build_cantor(a, depth);
    const Index last = (Index{1} << depth) - 1;
    if (last > a->max_index())
        throw ConfigError("sequence has fewer than 2^depth - 1 gaps");
    return refine(arrangement_for(a, kind, seed), a->term(last));
}

struct Args {
    std::string seq, target, kind = "assouad", arrangement = "cantor", out, json_out, ratios;
    int kmax = 40, nmin = 10, nmax = 40, depth = 14, stages = 6, K = 10;
    int plan_nmin = 8, plan_nmax = 1 << 20;
    long long count = 16, horizon = 4096;
    std::uint64_t seed = 0;
    double s = 0.8, alpha = 0.5;
    std::string x = "0", R, r, floor = "2^-10";
};

std::string out_or(const Args& a, const std::string& ext) {
    if (!a.json_out.empty())
        return a.json_out;
    return a.out.empty() ? std::string() : a.out + ext;
}

Outputs cmd_dim_formula(const Args& a) {
    const ModelPtr m = model_from_file(a.seq);
    DimensionReport rep;
    if (a.kind == "assouad")
        rep = assouad_formula(*m, a.kmax, a.nmin, a.nmax);
    else if (a.kind == "lower")
        rep = lower_formula(*m, a.kmax, a.nmin, a.nmax);
    else if (a.kind == "upper_box")
        rep = upper_box_dim(*m, a.nmax);
    else
        throw ConfigError("unknown --kind '" + a.kind + "'");
    Outputs o;
    o.files.push_back({a.out, to_csv(rep)});
    if (!a.out.empty())
        o.files.push_back({out_or(a, ".json"), dump(to_json(rep))});
    return o;
}

Outputs cmd_dim_empirical(const Args& a) {
    const ModelPtr m = model_from_file(a.seq);
    const Approximation ap = approximate(m, a.arrangement, a.depth, a.seed);
    const SamplingPlan plan = default_plan(*m, ap, std::max(a.plan_nmin, 1), a.plan_nmax);
    DimensionReport rep;
    if (a.kind == "assouad")
        rep = assouad_empirical(ap, plan);
    else if (a.kind == "lower")
        rep = lower_empirical(ap, plan);
    else
        throw ConfigError("unknown --kind '" + a.kind + "'");
    rep.log.push_back("arrangement=" + a.arrangement + " depth=" + std::to_string(a.depth) +
                      " seed=" + std::to_string(a.seed));
    Outputs o;
    o.files.push_back({a.out, to_csv(rep)});
    if (!a.out.empty())
        o.files.push_back({out_or(a, ".json"), dump(to_json(rep))});
    return o;
}

Outputs cmd_build(const std::string& what, const Args& a) {
    json j;
    if (what == "cantor") {
        j = approximation_json(build_cantor(model_from_file(a.seq), a.depth));
    } else if (what == "decreasing") {
        const ModelPtr m = model_from_file(a.seq);
        const DecreasingSet d = build_decreasing(*m, static_cast<Index>(a.count));
        json pts = json::array();
        for (const auto& p : d.points)
            pts.push_back({{"log2", fmt12(p.log2())}, {"value", fmt12(p.value())}});
        j = {{"construction", "decreasing"}, {"points", pts}, {"remaining_log2", fmt12(d.remaining.log2())}};
    } else if (what == "assouad-target") {
        const AssouadTargetBuild B = build_assouad_target(parse_ratio_list(a.ratios), a.s, a.stages);
        j = manifest_json(B);
        if (!all_pass(B.checks))
            throw ConstructionError("assouad target failed: " + dump(checks_json(B.checks)));
    } else if (what == "lower-target") {
        const LowerTargetBuild B = build_lower_target(parse_ratio_list(a.ratios), a.alpha, a.depth);
        j = manifest_json(B);
        if (!all_pass(B.checks))
            throw ConstructionError("lower target failed: " + dump(checks_json(B.checks)));
    } else if (what == "example35") {
        j = manifest_json(generate_example35(a.K));
    } else {
        throw ConfigError("unknown build target '" + what + "'");
    }
    return {{{a.out, dump(j)}}};
}

Outputs cmd_check(const Args& a) {
    const json spec = read_json_file(a.seq);
    const ModelPtr m = model_from_file(a.seq);
    const Index h = static_cast<Index>(a.horizon);
    const Diagnostic tau = doubling_constant(*m, h);
    const Diagnostic eps = lacunarity_inf(*m, h);
    // min over n of s_{n+1} / s_n, on the levels the horizon reaches
    double min_lg = std::numeric_limits<double>::infinity();
    int at = -1;
    for (int n = 0; (Index{2} << n) <= h && n < kMaxIndexLevel; ++n) {
        const LogLength s0 = m->scale(n), s1 = m->scale(n + 1);
        if (s1.is_zero())
            break;
        const double q = s1.log2() - s0.log2();
        if (q < min_lg) {
            min_lg = q;
            at = n;
        }
    }
    const DaClassification c = classify_Da(*m);
    json ev = json::array();
    for (auto [hz, e] : c.evidence)
        ev.push_back({{"horizon", hz}, {"epsilon", fmt12(e)}});
    json j = {{"sequence", m->describe()},
              {"horizon", a.horizon},
              {"tau_star", {{"value", fmt12(tau.value)}, {"log2", fmt12(tau.log2_value)}, {"at", tau.at}}},
              {"epsilon_star", {{"value", fmt12(eps.value)}, {"log2", fmt12(eps.log2_value)}, {"at", eps.at}}},
              {"min_scale_ratio", {{"value", fmt12(std::exp2(min_lg))}, {"log2", fmt12(min_lg)}, {"at", at}}},
              {"dim_A_Da", {{"verdict", c.verdict}, {"floor", fmt12(c.floor)}, {"stable", c.stable}, {"evidence", ev}}}};
    if (spec.value("kind", "") == "example35") {
        const Example35Sequence E = generate_example35(spec["K"].get<int>());
        j["example35"] = {{"checks", checks_json(E.checks)}, {"all_pass", all_pass(E.checks)}};
    }
    return {{{a.out, dump(j)}}};
}

Outputs cmd_map(const Args& a) {
    const ModelPtr src = model_from_file(a.seq), dst = model_from_file(a.target);
    const Correspondence c = correspondence_map(arrangement_for(src, a.arrangement, a.seed), dst, parse_len_arg(a.floor));
    std::ostringstream os;
    os << "x,pi_x\n";
    for (auto [x, y] : c.pairs)
        os << fmt12(x) << ',' << fmt12(y) << '\n';
    return {{{a.out, os.str()}}};
}

Outputs cmd_cover(const Args& a) {
    const ModelPtr m = model_from_file(a.seq);
    const Approximation ap = approximate(m, a.arrangement, a.depth, a.seed);
    if (a.R.empty() || a.r.empty())
        throw ConfigError("cover needs --R and --r");
    long double x;
    try {
        x = std::stold(a.x);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse --x '" + a.x + "'");
    }
    const CoverQuery q{x, parse_len_arg(a.R), parse_len_arg(a.r)};
    const CoverBounds cb = local_cover(ap, q);
    json j = {{"x", fmt12(q.x)},
              {"R_log2", fmt12(q.R.log2())},
              {"r_log2", fmt12(q.r.log2())},
              {"lower", fmt12(cb.lower)},
              {"upper", fmt12(cb.upper)},
              {"certified", cb.certified}};
    return {{{a.out, dump(j)}}};
}

int exit_code(const Error& e) {
    if (e.category() == "config")
        return 2;
    if (e.category() == "construction")
        return 4;
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractlab: complementary sets of gap sequences and their dimensions"};
    app.require_subcommand(1);
    Args a;
    std::string chosen;

    auto common = [&a](CLI::App* c) {
        c->add_option("--out", a.out, "output path (stdout when omitted)");
    };

    auto* dim = app.add_subcommand("dim", "dimension formulas and estimates");
    dim->require_subcommand(1);
    auto* df = dim->add_subcommand("formula", "formula values on a finite window");
    df->add_option("--seq", a.seq)->required();
    df->add_option("--kind", a.kind, "assouad | lower | upper_box");
    df->add_option("--kmax", a.kmax);
    df->add_option("--nmin", a.nmin);
    df->add_option("--nmax", a.nmax);
    df->add_option("--json", a.json_out, "convergence table path (default <out>.json)");
    common(df);
    df->callback([&] { chosen = "dim formula"; });

    auto* de = dim->add_subcommand("empirical", "covering-number estimates on a placed stage");
    de->add_option("--seq", a.seq)->required();
    de->add_option("--kind", a.kind, "assouad | lower");
    de->add_option("--arrangement", a.arrangement, "cantor | decreasing | random");
    de->add_option("--depth", a.depth);
    de->add_option("--seed", a.seed);
    de->add_option("--nmin", a.plan_nmin, "smallest n in the (s_k, s_k+n) plan");
    de->add_option("--nmax", a.plan_nmax);
    de->add_option("--json", a.json_out);
    common(de);
    de->callback([&] { chosen = "dim empirical"; });

    auto* build = app.add_subcommand("build", "build sets and constructions");
    build->require_subcommand(1);
    for (const char* name : {"cantor", "decreasing", "assouad-target", "lower-target", "example35"}) {
        auto* b = build->add_subcommand(name);
        const std::string n = name;
        if (n == "cantor" || n == "decreasing")
            b->add_option("--seq", a.seq)->required();
        if (n == "cantor" || n == "lower-target")
            b->add_option("--depth", a.depth);
        if (n == "decreasing")
            b->add_option("--count", a.count);
        if (n == "assouad-target" || n == "lower-target")
            b->add_option("--ratios", a.ratios, "comma list; the last ratio repeats")->required();
        if (n == "assouad-target") {
            b->add_option("--s", a.s);
            b->add_option("--stages", a.stages);
        }
        if (n == "lower-target")
            b->add_option("--alpha", a.alpha);
        if (n == "example35")
            b->add_option("--K", a.K);
        common(b);
        b->callback([&chosen, n] { chosen = "build " + n; });
    }

    auto* check = app.add_subcommand("check", "sequence diagnostics");
    check->add_option("--seq", a.seq)->required();
    check->add_option("--horizon", a.horizon);
    common(check);
    check->callback([&] { chosen = "check"; });

    auto* map = app.add_subcommand("map", "correspondence map between two equivalent sequences");
    map->add_option("--seq", a.seq)->required();
    map->add_option("--target", a.target)->required();
    map->add_option("--arrangement", a.arrangement);
    map->add_option("--seed", a.seed);
    map->add_option("--floor", a.floor, "place every gap of length >= floor (decimal or 2^e)");
    common(map);
    map->callback([&] { chosen = "map"; });

    auto* cover = app.add_subcommand("cover", "bounds for one covering number");
    cover->add_option("--seq", a.seq)->required();
    cover->add_option("--arrangement", a.arrangement);
    cover->add_option("--depth", a.depth);
    cover->add_option("--seed", a.seed);
    cover->add_option("--x", a.x);
    cover->add_option("--R", a.R);
    cover->add_option("--r", a.r);
    common(cover);
    cover->callback([&] { chosen = "cover"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Outputs o;
        if (chosen == "dim formula")
            o = cmd_dim_formula(a);
        else if (chosen == "dim empirical")
            o = cmd_dim_empirical(a);
        else if (chosen.rfind("build ", 0) == 0)
            o = cmd_build(chosen.substr(6), a);
        else if (chosen == "check")
            o = cmd_check(a);
        else if (chosen == "map")
            o = cmd_map(a);
        else if (chosen == "cover")
            o = cmd_cover(a);
        emit(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
