#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "charp/covers.hpp"
#include "charp/criteria.hpp"
#include "charp/localalg.hpp"
#include "charp/strata.hpp"

namespace charp::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 1;

struct Common {
    std::string format = "json";
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::uint64_t> budget_flag;
    unsigned threads = 1;
};

struct Budget {
    std::uint64_t value;
    std::string source;
};

Budget resolve_budget(const Common& c) {
    if (c.budget_flag) {
        if (*c.budget_flag == 0) throw PreconditionError("--budget must be positive");
        return {*c.budget_flag, "flag"};
    }
    if (const char* env = std::getenv(kBudgetEnv)) {
        std::uint64_t v = 0;
        try {
            std::size_t used = 0;
            v = std::stoull(env, &used);
            if (used != std::string(env).size()) v = 0;
        } catch (const std::exception&) {
            v = 0;
        }
        if (v == 0) throw PreconditionError(std::string(kBudgetEnv) + " must be a positive integer");
        return {v, "env"};
    }
    return {kDefaultScanBudget, "default"};
}

Json symbol_json(std::uint32_t i, std::uint32_t j) { return Json::array({i, j}); }

std::string element_str(const Field& F, Code c) { return F.format(c); }

Json point_json(const Field& F, const std::vector<Code>& pt) {
    Json a = Json::array();
    for (Code c : pt) a.push_back(element_str(F, c));
    return a;
}

Json matrix_json(const Field& F, const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(element_str(F, m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> read_section_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot read section file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw PreconditionError("section file '" + path + "' has no polynomials");
    return lines;
}

void render_text(const Json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_text(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array() && std::any_of(j.begin(), j.end(), [](const Json& x) { return x.is_structured(); })) {
        for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_string()) {
        out << prefix << ": " << j.get<std::string>() << "\n";
    } else {
        out << prefix << ": " << j.dump() << "\n";
    }
}

void emit(const Json& report, const Common& c, std::ostream& out) {
    if (c.format == "text")
        render_text(report, "", out);
    else
        out << report.dump(2) << "\n";
}

Json error_object(const std::string& command, const std::string& kind, const std::string& message) {
    Json j;
    j["schema"] = report_schema_version();
    j["command"] = command;
    j["error"] = {{"kind", kind}, {"message", message}};
    return j;
}

Json header(const std::string& command) {
    Json j;
    j["schema"] = report_schema_version();
    j["command"] = command;
    return j;
}

// Series input shared by milnor, determinacy, versal and split.
struct SeriesArgs {
    std::string field;
    std::size_t n = 0;
    std::size_t params = 0;
    std::string f;
    std::uint32_t order = 0;
    std::uint32_t cap = kDefaultMilnorCap;
};

void add_series_options(CLI::App* sub, SeriesArgs& a, bool with_cap) {
    sub->add_option("--field", a.field, "field literal p or p^k")->required();
    sub->add_option("--n", a.n, "number of variables")->required();
    sub->add_option("--f", a.f, "power series in x1..xn")->required();
    sub->add_option("--order", a.order, "truncation order D");
    if (with_cap) sub->add_option("--cap", a.cap, "largest r tried for m^r in the Jacobian ideal");
}

Json series_config(const SeriesArgs& a, std::uint32_t D, bool with_cap) {
    Json c;
    c["field"] = FieldSpec::parse(a.field)->literal();
    c["n"] = a.n;
    if (a.params) c["params"] = a.params;
    c["f"] = a.f;
    c["order"] = D;
    if (with_cap) c["cap"] = a.cap;
    return c;
}

// Milnor-type commands need D >= cap + 1; an explicit smaller --order lowers the cap instead.
std::pair<TruncatedSeries, std::uint32_t> milnor_input(SeriesArgs& a) {
    auto spec = FieldSpec::parse(a.field);
    if (a.n == 0) throw PreconditionError("--n must be positive");
    std::uint32_t D = a.cap + 1;
    if (a.order) {
        if (a.order < 2) throw PreconditionError("--order must be at least 2");
        D = a.order;
        a.cap = std::min(a.cap, a.order - 1);
    }
    return {ts_parse(a.f, a.n, D, spec), D};
}

Json basis_json(const Field& F, const Variables& vars, const std::vector<Exponent>& basis) {
    Json b = Json::array();
    for (const auto& e : basis) b.push_back(format_term(F, vars, e, 1));
    return b;
}

Json cmd_milnor(SeriesArgs a) {
    auto [f, D] = milnor_input(a);
    auto r = milnor_number(f, a.cap);
    Json j = header("milnor");
    j["config"] = series_config(a, D, true);
    Json res;
    res["finite"] = r.finite;
    res["mu"] = r.finite ? Json(r.mu) : Json(nullptr);
    res["mu_str"] = r.mu_str();
    res["r_min"] = r.r_min ? Json(*r.r_min) : Json(nullptr);
    res["basis"] = basis_json(f.F(), f.ctx()->vars(), r.basis);
    j["result"] = res;
    return j;
}

Json cmd_determinacy(SeriesArgs a) {
    auto [f, D] = milnor_input(a);
    auto b = determinacy_bound(f, a.cap);
    Json j = header("determinacy");
    j["config"] = series_config(a, D, true);
    j["result"] = {{"finite", b.has_value()}, {"bound", b ? Json(*b) : Json(nullptr)}};
    return j;
}

Json cmd_versal(SeriesArgs a) {
    auto [f, D] = milnor_input(a);
    auto v = versal_unfolding(f, a.cap);
    Json j = header("versal");
    j["config"] = series_config(a, D, true);
    j["result"] = {{"mu", v.basis.size()},
                   {"basis", basis_json(f.F(), f.ctx()->vars(), v.basis)},
                   {"unfolding", v.F.str()}};
    return j;
}

Json cmd_split(SeriesArgs a, bool no_extension) {
    auto spec = FieldSpec::parse(a.field);
    if (a.n == 0) throw PreconditionError("--n must be positive");
    const std::uint32_t D = a.order ? a.order : 6;
    auto ctx = SeriesContext::make(spec, a.n, D, a.params);
    auto F = TruncatedSeries::parse(a.f, ctx);
    auto r = split(F, !no_extension);
    Json j = header("split");
    Json cfg = series_config(a, D, false);
    cfg["allow_extension"] = !no_extension;
    j["config"] = cfg;
    Json phi = Json::array();
    for (const auto& im : r.phi.images()) phi.push_back(im.str());
    j["result"] = {{"r", r.r},
                   {"shape", r.qf.tag()},
                   {"extension_degree", r.extension_degree},
                   {"field", r.qf.field->literal()},
                   {"q", r.q.str()},
                   {"residual", r.residual.str()},
                   {"phi", phi}};
    return j;
}

struct QfArgs {
    std::string field;
    std::size_t n = 0;
    std::string q;
    bool no_extension = false;
};

Json cmd_classify_qf(const QfArgs& a) {
    auto spec = FieldSpec::parse(a.field);
    if (a.n == 0) throw PreconditionError("--n must be positive");
    auto q = QuadraticForm::parse(a.q, spec, a.n);
    auto r = qf_classify(q, !a.no_extension);
    Json j = header("classify-qf");
    j["config"] = {{"field", spec->literal()}, {"n", a.n}, {"q", a.q}, {"allow_extension", !a.no_extension}};
    j["result"] = {{"rank", r.rank},
                   {"shape", r.tag()},
                   {"extension_degree", r.extension_degree},
                   {"field", r.field->literal()},
                   {"normal_form", r.normal_form().str()},
                   {"matrix", matrix_json(*r.field, r.matrix)},
                   {"verified", r.normal_form().substitute(r.matrix) == q.embedded(Embedding(spec, r.extension_degree))}};
    return j;
}

struct SectionArgs {
    std::string field;
    std::size_t n = 0;
    std::size_t e = 1;
    std::uint32_t deg = 3;
    std::string section_file;
    std::vector<std::string> polys;
    std::uint32_t ext_max = 1;
    std::string method = "lines";
};

void add_section_options(CLI::App* sub, SectionArgs& a) {
    sub->add_option("--field", a.field, "field literal p or p^k")->required();
    sub->add_option("--n", a.n, "number of variables")->required();
    sub->add_option("--e", a.e, "number of components of a sampled section");
    sub->add_option("--deg", a.deg, "degree of a sampled section");
    sub->add_option("--section", a.section_file, "file with one polynomial per line");
    sub->add_option("--f", a.polys, "component polynomial (repeatable)");
    sub->add_option("--ext-max", a.ext_max, "largest extension degree M");
}

std::pair<Section, std::string> load_section(const SectionArgs& a, const Common& c) {
    auto spec = FieldSpec::parse(a.field);
    if (a.n == 0) throw PreconditionError("--n must be positive");
    if (!a.section_file.empty() && !a.polys.empty()) throw PreconditionError("give either --section or --f, not both");
    if (!a.section_file.empty()) return {Section::parse(read_section_file(a.section_file), spec, a.n), "file"};
    if (!a.polys.empty()) return {Section::parse(a.polys, spec, a.n), "inline"};
    if (a.e == 0) throw PreconditionError("--e must be positive");
    return {sample_section(a.n, a.e, a.deg, spec, c.seed), "sampled"};
}

Json section_config(const SectionArgs& a, const Section& s, const std::string& source, const Common& c,
                    const Budget& b) {
    Json cfg;
    cfg["field"] = s.spec->literal();
    cfg["n"] = s.n;
    cfg["e"] = s.e;
    cfg["deg"] = s.d;
    cfg["source"] = source;
    cfg["seed"] = c.seed;
    cfg["ext_max"] = a.ext_max;
    cfg["budget"] = b.value;
    cfg["budget_source"] = b.source;
    return cfg;
}

Json cmd_strata_scan(const SectionArgs& a, const Common& c) {
    const auto b = resolve_budget(c);
    auto [s, source] = load_section(a, c);
    if (a.method != "lines" && a.method != "exhaustive") throw PreconditionError("--method is lines or exhaustive");
    ScanOptions opt{a.ext_max, b.value, c.threads, a.method == "lines" ? ScanMethod::Lines : ScanMethod::Exhaustive};
    auto rep = strata_scan(s, opt);
    Json j = header("strata-scan");
    Json cfg = section_config(a, s, source, c, b);
    cfg["method"] = a.method;
    j["config"] = cfg;
    j["section"] = s.lines();
    Json levels = Json::array();
    for (const auto& lv : rep.levels) {
        Json counts = Json::array();
        for (const auto& [sym, cnt] : lv.counts) counts.push_back({{"symbol", symbol_json(sym.first, sym.second)}, {"count", cnt}});
        levels.push_back({{"m", lv.m}, {"total", lv.total}, {"counts", counts}});
    }
    j["levels"] = levels;
    // Every admissible symbol, with the closed-form codimension as the oracle.
    Json symbols = Json::array();
    const std::uint32_t n = static_cast<std::uint32_t>(s.n), e = static_cast<std::uint32_t>(s.e),
                        mm = static_cast<std::uint32_t>(s.m());
    const bool char2 = s.spec->p() == 2;
    for (std::uint32_t i = 0; i <= mm; ++i) {
        const std::uint32_t k = n - mm + i, cdim = e - mm + i;
        for (std::uint32_t jj = 0; jj <= (cdim == 0 ? 0 : k); ++jj) {
            auto est = estimate_dim(rep, i, jj);
            const auto codim = codim_tb({n, e, i, jj, char2});
            const auto expected = static_cast<std::int64_t>(n) - codim;
            const bool agrees = codim > static_cast<std::int64_t>(n) ? est.empty
                                                                     : std::abs(est.dim - expected) <= 1;
            symbols.push_back({{"symbol", symbol_json(i, jj)},
                               {"counts", est.counts},
                               {"empty", est.empty},
                               {"estimate", est.dim >= 0 ? Json(est.dim) : Json(nullptr)},
                               {"codim_tb", codim},
                               {"expected_dim", expected},
                               {"oracle_agrees", agrees}});
        }
    }
    j["symbols"] = symbols;
    return j;
}

Json cmd_cover(const SectionArgs& a, std::uint64_t p, const Common& c) {
    const auto b = resolve_budget(c);
    auto [s, source] = load_section(a, c);
    auto chart = build_cover(s, p);
    Json j = header("cover");
    Json cfg = section_config(a, s, source, c, b);
    cfg["p"] = p;
    j["config"] = cfg;
    j["section"] = s.lines();
    Json eqs = Json::array();
    for (const auto& eq : chart.equations) eqs.push_back(eq.str());
    j["equations"] = eqs;
    Json counts = Json::array(), sing = Json::array();
    for (std::uint32_t m = 1; m <= a.ext_max; ++m) {
        const auto count = cover_point_count(chart, m, b.value);
        const std::uint64_t Q = s.spec.extension(m)->size();
        std::uint64_t expected = 1;
        for (std::size_t v = 0; v < s.n; ++v) expected *= Q;
        counts.push_back({{"m", m}, {"count", count}, {"expected", expected}, {"equal", count == expected}});

        auto pts = cover_singular_points(chart, m, b.value);
        SectionEvaluator ev(s, m);
        const Field& G = *ev.target();
        std::vector<std::vector<Code>> lifted;
        for (const auto& cp : critical_points(s, m, b.value, c.threads)) {
            auto pt = cp.point;
            for (std::size_t l = 0; l < s.e; ++l) pt.push_back(G.pow(ev.value(l, cp.point), Q / G.p()));
            lifted.push_back(pt);
        }
        Json listed = Json::array();
        for (std::size_t k = 0; k < pts.size() && k < 64; ++k) listed.push_back(point_json(G, pts[k]));
        sing.push_back({{"m", m},
                        {"count", pts.size()},
                        {"agrees_with_lifted_critical_locus", pts == lifted},
                        {"points", listed},
                        {"truncated", pts.size() > 64}});
    }
    j["point_counts"] = counts;
    j["singular_points"] = sing;
    auto rep = strata_scan(s, {a.ext_max, b.value, c.threads, ScanMethod::Lines});
    auto v = cover_classify(s, rep);
    std::string label = !v.integral ? "not integral" : v.normal ? "integral, normal" : "integral, not normal";
    j["verdict"] = {{"status", "estimated"},
                    {"sigma1_codim_estimate", v.sigma1_codim_estimate ? Json(*v.sigma1_codim_estimate) : Json(nullptr)},
                    {"integral", v.integral},
                    {"normal", v.normal},
                    {"classification", label},
                    {"evidence", v.evidence}};
    return j;
}

Json cmd_mori(std::uint32_t N, const std::vector<std::uint32_t>& degrees, std::uint64_t p, const Common& c) {
    auto m = mori_equations(N, degrees, p, c.seed);
    auto weighted = mori_weighted_degrees(m);
    bool homogeneous = true;
    for (std::size_t k = 0; k < weighted.size(); ++k)
        homogeneous = homogeneous && weighted[k] && *weighted[k] == m.equation_degrees[k];
    Json vars = Json::array();
    for (std::size_t v = 0; v < m.vars.size(); ++v) vars.push_back(m.vars.name(v));
    Json j = header("mori");
    j["config"] = {{"N", N}, {"degrees", degrees}, {"p", p}, {"seed", c.seed}};
    j["result"] = {{"variables", vars},
                   {"weights", m.weights},
                   {"equations", m.equations},
                   {"equation_degrees", m.equation_degrees},
                   {"homogeneous", homogeneous}};
    return j;
}

Json cmd_codim(std::uint32_t n, std::uint32_t e, std::uint32_t i, std::optional<std::uint32_t> jj, bool char2) {
    auto value = codim_tb({n, e, i, jj, char2});
    Json j = header("codim");
    j["config"] = {{"n", n}, {"e", e}, {"i", i}, {"j", jj ? Json(*jj) : Json(nullptr)}, {"char2", char2}};
    j["result"] = {{"codim", value},
                   {"first_order", codim_tb({n, e, i, std::nullopt, char2})},
                   {"sign", char2 ? "minus" : "plus"}};
    return j;
}

Json criterion_json(const CriterionReport& r) {
    return {{"p", r.p},
            {"c", r.degrees.size()},
            {"remainders", r.remainders},
            {"H1", {{"half", r.h1_half}, {"third", r.h1_third}, {"table", r.h1_table}, {"value", r.H1}}},
            {"H2", r.H2},
            {"H3", r.H3},
            {"verdict", r.verdict},
            {"reason", r.reason()},
            {"general_type", r.general_type}};
}

Json cmd_check_ci(std::uint32_t N, const std::vector<std::uint32_t>& degrees, std::uint64_t p, bool autop) {
    Json j = header("check-ci");
    j["config"] = {{"N", N}, {"degrees", degrees}, {"p", autop ? Json(nullptr) : Json(p)}, {"auto", autop}};
    if (!autop) {
        j["result"] = criterion_json(check_ci(N, degrees, p));
        return j;
    }
    if (degrees.empty()) throw PreconditionError("--degrees is empty");
    Json tried = Json::array();
    Json witness = nullptr;
    for (auto q : primes_upto(*std::max_element(degrees.begin(), degrees.end()))) {
        auto r = check_ci(N, degrees, q);
        tried.push_back(criterion_json(r));
        if (r.verdict) {
            witness = q;
            break;
        }
    }
    j["result"] = {{"witness", witness}, {"verdict", !witness.is_null()}, {"tried", tried}};
    return j;
}

Json cmd_sweep(std::uint32_t N_max, const Common& c) {
    auto r = corollary_sweep(N_max, exception_sets(), c.threads);
    Json j = header("sweep");
    j["config"] = {{"max", N_max}};
    j["result"] = {{"cases", r.cases},
                   {"counterexamples", r.counterexamples},
                   {"zero_counterexamples", r.counterexamples.empty()},
                   {"unneeded_table_entries", r.unneeded_entries}};
    return j;
}

}  // namespace

std::string report_schema_version() { return "1.0.0"; }

int run(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"Local algebra, Thom-Boardman strata and irrationality criteria in characteristic p", "charp"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", common.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--seed", common.seed, "seed for sampled inputs");
        sub->add_option("--budget", common.budget_flag, "enumeration budget in points");
        sub->add_option("--threads", common.threads, "worker threads for scans")->check(CLI::Range(1u, 256u));
    };

    SeriesArgs milnor_a, det_a, versal_a, split_a;
    auto* milnor = app.add_subcommand("milnor", "Milnor number and monomial basis of the Milnor algebra");
    add_series_options(milnor, milnor_a, true);
    auto* det = app.add_subcommand("determinacy", "finite determinacy bound 2*max(r_min, 1)");
    add_series_options(det, det_a, true);
    auto* versal = app.add_subcommand("versal", "versal unfolding over the monomial basis");
    add_series_options(versal, versal_a, true);
    auto* spl = app.add_subcommand("split", "splitting lemma with parameters");
    add_series_options(spl, split_a, false);
    spl->add_option("--params", split_a.params, "number of leading parameters s1..st");
    bool split_no_ext = false;
    spl->add_flag("--no-extension", split_no_ext, "fail instead of extending the field");

    QfArgs qf_a;
    auto* qf = app.add_subcommand("classify-qf", "normal form of a quadratic form");
    qf->add_option("--field", qf_a.field)->required();
    qf->add_option("--n", qf_a.n)->required();
    qf->add_option("--q", qf_a.q, "quadratic form in x1..xn")->required();
    qf->add_flag("--no-extension", qf_a.no_extension);

    SectionArgs scan_a, cover_a;
    auto* scan = app.add_subcommand("strata-scan", "exhaustive Thom-Boardman symbol scan over F_{q^m}");
    add_section_options(scan, scan_a);
    scan->add_option("--method", scan_a.method, "lines or exhaustive");
    std::uint64_t cover_p = 0;
    auto* cover = app.add_subcommand("cover", "inseparable cover t^p = f checked on points");
    add_section_options(cover, cover_a);
    cover->add_option("--p", cover_p, "exponent (the characteristic)")->required();

    std::uint32_t mori_N = 0, ci_N = 0, sweep_max = 0;
    std::vector<std::uint32_t> mori_deg, ci_deg;
    std::uint64_t mori_p = 0, ci_p = 2;
    auto* mori = app.add_subcommand("mori", "equations of the Mori degeneration");
    mori->add_option("--N", mori_N)->required();
    mori->add_option("--degrees", mori_deg)->required()->delimiter(',');
    mori->add_option("--p", mori_p)->required();

    std::uint32_t cn = 0, ce = 0, ci = 0;
    std::optional<std::uint32_t> cj;
    bool cchar2 = false;
    auto* codim = app.add_subcommand("codim", "codimension of a Thom-Boardman locus");
    codim->add_option("--n", cn)->required();
    codim->add_option("--e", ce)->required();
    codim->add_option("--i", ci)->required();
    codim->add_option("--j", cj);
    codim->add_flag("--char2", cchar2);

    bool ci_auto = false;
    auto* check = app.add_subcommand("check-ci", "hypotheses of the complete intersection criterion");
    check->add_option("--N", ci_N)->required();
    check->add_option("--degrees", ci_deg)->required()->delimiter(',');
    check->add_option("--p", ci_p);
    check->add_flag("--auto", ci_auto, "try every prime up to max degree");

    auto* sweep = app.add_subcommand("sweep", "exhaustive consistency sweep of the corollary");
    sweep->add_option("--max", sweep_max)->required();

    for (auto* sub : {milnor, det, versal, spl, qf, scan, cover, mori, codim, check, sweep}) add_common(sub);

    std::vector<std::string> owned{"charp"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : owned) argv.push_back(s.data());
    std::string command = args.empty() ? "" : args.front();
    if (!command.empty() && command.front() != '-' && !app.get_subcommand_no_throw(command)) {
        out << error_object(command, "usage", "unknown subcommand '" + command + "'").dump(2) << "\n";
        return kExitUsage;
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        out << error_object(command, "usage", e.what()).dump(2) << "\n";
        return kExitUsage;
    }

    try {
        Json report;
        if (milnor->parsed()) report = cmd_milnor(milnor_a);
        else if (det->parsed()) report = cmd_determinacy(det_a);
        else if (versal->parsed()) report = cmd_versal(versal_a);
        else if (spl->parsed()) report = cmd_split(split_a, split_no_ext);
        else if (qf->parsed()) report = cmd_classify_qf(qf_a);
        else if (scan->parsed()) report = cmd_strata_scan(scan_a, common);
        else if (cover->parsed()) report = cmd_cover(cover_a, cover_p, common);
        else if (mori->parsed()) report = cmd_mori(mori_N, mori_deg, mori_p, common);
        else if (codim->parsed()) report = cmd_codim(cn, ce, ci, cj, cchar2);
        else if (check->parsed()) report = cmd_check_ci(ci_N, ci_deg, ci_p, ci_auto);
        else report = cmd_sweep(sweep_max, common);
        // Every report is self-describing about its seed and budget, used or not.
        auto& cfg = report["config"];
        if (!cfg.contains("seed")) cfg["seed"] = common.seed;
        if (!cfg.contains("budget")) {
            const auto b = resolve_budget(common);
            cfg["budget"] = b.value;
            cfg["budget_source"] = b.source;
        }
        emit(report, common, out);
        return kExitOk;
    } catch (const BudgetExceeded& e) {
        emit(error_object(command, "budget", e.what()), common, out);
        return kExitBudget;
    } catch (const PreconditionError& e) {
        emit(error_object(command, "precondition", e.what()), common, out);
        return kExitPrecondition;
    } catch (const std::exception& e) {
        emit(error_object(command, "internal", e.what()), common, out);
        return 1;
    }
}

}  // namespace charp::cli
