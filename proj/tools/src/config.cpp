#include "asymlab_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace asymlab::cli {
namespace {

// ---------------------------------------------------------------------------
// Lexical layer

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s == "inf" || s == "+inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Strips a trailing comment that starts outside double quotes.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (!quoted && (line[i] == '#' || line[i] == ';')) return line.substr(0, i);
    }
    return line;
}

struct Item {
    std::string text;
    bool quoted = false;
};

// Splits on commas outside quotes; reports unbalanced quotes.
bool split_items(std::string_view s, std::vector<Item>& out) {
    Item cur;
    bool quoted = false, any = false;
    auto flush = [&] {
        if (!cur.quoted) cur.text = std::string(trim(cur.text));
        out.push_back(cur);
        cur = {};
    };
    for (char ch : s) {
        any = true;
        if (ch == '"') {
            if (!quoted) cur.text = std::string(trim(cur.text));
            quoted = !quoted;
            cur.quoted = true;
        } else if (ch == ',' && !quoted) {
            flush();
        } else if (quoted || !cur.quoted) {
            cur.text += ch;
        } else if (ch != ' ' && ch != '\t') {
            return false;  // text after a closing quote
        }
    }
    if (quoted) return false;
    if (any) flush();
    return true;
}

std::optional<Value> parse_value(std::string_view raw, std::string& why) {
    std::string_view s = trim(raw);
    bool bracketed = false;
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') {
            why = "unterminated '['";
            return std::nullopt;
        }
        bracketed = true;
        s = trim(s.substr(1, s.size() - 2));
    }
    std::vector<Item> items;
    if (!split_items(s, items)) {
        why = "unbalanced quotes";
        return std::nullopt;
    }
    if (!bracketed && items.empty()) {
        why = "missing value";
        return std::nullopt;
    }
    for (const auto& it : items) {
        if (!it.quoted && it.text.empty()) {
            why = "empty list element";
            return std::nullopt;
        }
    }
    const bool list = bracketed || items.size() > 1;
    bool all_numbers = true;
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (const auto& it : items) {
        strs.push_back(it.text);
        auto v = it.quoted ? std::nullopt : parse_number(it.text);
        if (v) {
            nums.push_back(*v);
        } else {
            all_numbers = false;
        }
    }
    if (!list) {
        if (all_numbers) return Value(nums.front());
        return Value(strs.front());
    }
    if (all_numbers) return Value(nums);
    return Value(strs);
}

struct RawEntry {
    Value value;
    int line = 0;
};

struct RawSection {
    std::string name;
    int line = 0;
    std::map<std::string, RawEntry> entries;
    std::vector<std::string> order;
};

// ---------------------------------------------------------------------------
// Typed conversion with issue collection

struct Collector {
    std::vector<ConfigIssue> issues;
    void add(int line, std::string msg) { issues.push_back({line, std::move(msg)}); }
};

std::string type_name(const Value& v) {
    switch (v.index()) {
        case 0: return "a number";
        case 1: return "a string";
        case 2: return "a number list";
        default: return "a string list";
    }
}

const double* as_number(const Value& v) { return std::get_if<double>(&v); }

std::optional<std::vector<double>> as_numbers(const Value& v) {
    if (auto* d = std::get_if<std::vector<double>>(&v)) return *d;
    if (auto* d = std::get_if<double>(&v)) return std::vector<double>{*d};
    if (auto* s = std::get_if<std::vector<std::string>>(&v); s && s->empty()) return std::vector<double>{};
    return std::nullopt;
}

std::optional<std::vector<std::string>> as_strings(const Value& v) {
    if (auto* s = std::get_if<std::vector<std::string>>(&v)) return *s;
    if (auto* s = std::get_if<std::string>(&v)) return std::vector<std::string>{*s};
    if (auto* d = std::get_if<std::vector<double>>(&v); d && d->empty()) return std::vector<std::string>{};
    return std::nullopt;
}

class SectionReader {
public:
    SectionReader(const RawSection& s, Collector& c) : s_(s), c_(c) {}

    const RawEntry* get(const std::string& key) {
        used_.insert(key);
        auto it = s_.entries.find(key);
        return it == s_.entries.end() ? nullptr : &it->second;
    }

    void number(const std::string& key, double& out) {
        if (const auto* e = get(key)) {
            if (const double* d = as_number(e->value)) {
                out = *d;
            } else {
                c_.add(e->line, key + " must be a number, got " + type_name(e->value));
            }
        }
    }
    void optional_number(const std::string& key, std::optional<double>& out) {
        if (get_peek(key)) {
            double v = 0.0;
            number(key, v);
            out = v;
        }
    }
    template <class Int>
    void integer(const std::string& key, Int& out) {
        if (const auto* e = get(key)) {
            const double* d = as_number(e->value);
            if (!d || *d != std::floor(*d) || std::abs(*d) > 9.0e15) {
                c_.add(e->line, key + " must be an integer");
            } else {
                out = static_cast<Int>(*d);
            }
        }
    }
    void text(const std::string& key, std::string& out) {
        if (const auto* e = get(key)) {
            if (auto* s = std::get_if<std::string>(&e->value)) {
                out = *s;
            } else if (auto* d = std::get_if<double>(&e->value)) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", *d);
                out = buf;  // numeric-looking names stay usable
            } else {
                c_.add(e->line, key + " must be a string, got " + type_name(e->value));
            }
        }
    }
    int line_of(const std::string& key) const {
        auto it = s_.entries.find(key);
        return it == s_.entries.end() ? s_.line : it->second.line;
    }
    bool get_peek(const std::string& key) const { return s_.entries.count(key) != 0; }
    void finish() {
        for (const auto& key : s_.order)
            if (!used_.count(key) && !prefixed(key))
                c_.add(s_.entries.at(key).line, "unknown key '" + key + "' in [" + s_.name + "]");
    }
    void allow_prefix(std::string p) { prefixes_.push_back(std::move(p)); }

private:
    bool prefixed(const std::string& key) const {
        return std::any_of(prefixes_.begin(), prefixes_.end(), [&](const std::string& p) { return key.rfind(p, 0) == 0; });
    }
    const RawSection& s_;
    Collector& c_;
    std::set<std::string> used_;
    std::vector<std::string> prefixes_;
};

// Schema of run parameters per experiment kind.
enum class PType { Number, Integer, String, NumberList, StringList };

struct ParamSpec {
    ParamSpec(std::string k, PType t, std::optional<Value> f, bool r = false, std::vector<std::string> c = {})
        : key(std::move(k)), type(t), fallback(std::move(f)), required(r), choices(std::move(c)) {}
    std::string key;
    PType type;
    std::optional<Value> fallback;  // filled in when absent
    bool required;
    std::vector<std::string> choices;
};

std::vector<ParamSpec> run_schema(std::string_view kind) {
    using V = Value;
    std::vector<ParamSpec> s;
    auto num = [&](std::string k, double d) { s.push_back(ParamSpec{std::move(k), PType::Number, V(d)}); };
    auto integer = [&](std::string k, int d) { s.push_back(ParamSpec{std::move(k), PType::Integer, V(double(d))}); };
    auto opt = [&](std::string k, PType t) { s.push_back(ParamSpec{std::move(k), t, std::nullopt}); };
    auto req = [&](std::string k, PType t) { s.push_back(ParamSpec{std::move(k), t, std::nullopt, true}); };
    auto choice = [&](std::string k, std::string d, std::vector<std::string> c) {
        s.push_back(ParamSpec{std::move(k), PType::String, V(std::move(d)), false, std::move(c)});
    };
    if (kind == "classify") {
        req("operators", PType::StringList);
        opt("expect", PType::StringList);
    } else if (kind == "barriers") {
        req("operator", PType::String);
        choice("barrier", "scherk", {"scherk", "annulus", "singular"});
        num("delta", 0.0);
        num("rho", 1.0);
        num("K", 1.0);
        num("b", 1.0);
        num("d_min", 1e-4);
        s.push_back(ParamSpec{"range", PType::NumberList, V(std::vector<double>{-14.0, 8.0})});
        opt("table", PType::NumberList);
    } else if (kind == "residuals") {
        req("operator", PType::String);
        choice("barrier", "scherk", {"scherk", "annulus", "singular"});
        choice("expect", "auto", {"auto", "supersolution", "solution"});
        opt("geodesic", PType::String);
        opt("horosphere", PType::String);
        num("delta", 0.0);
        num("rho", 1.0);
        num("K", 1.0);
        num("b", 1.0);
        integer("samples", 200);
        num("h", 1e-2);
        integer("levels", 3);
        opt("band", PType::NumberList);
    } else if (kind == "radial-bvp") {
        req("operator", PType::String);
        choice("coordinates", "spherical", {"spherical", "horospherical"});
        num("r0", 1.0);
        num("r1", 2.0);
        integer("nodes", 512);
        num("grading", 1.0);
        num("u_lo", 0.0);
        num("u_hi", 1.0);
        num("oracle_tol", 1e-6);
    } else if (kind == "disk-solve") {
        req("operator", PType::String);
        choice("data", "constant", {"constant", "trace", "spike"});
        num("value", 1.0);
        opt("horosphere", PType::String);
        num("plateau", 1.0);
        num("width", 0.5);
        num("r_trunc", 4.0);
        integer("nr", 96);
        integer("ntheta", 128);
        opt("clustering", PType::Number);
        choice("sampling", "pointwise", {"pointwise", "cell-average"});
        num("oracle_tol", 5e-4);
    } else if (kind == "removability-probe") {
        req("operator", PType::String);
        choice("data", "spike", {"spike", "trace"});
        num("plateau", 1.0);
        opt("horosphere", PType::String);
        s.push_back(ParamSpec{"r_sequence", PType::NumberList, V(std::vector<double>{3, 4, 5, 6})});
        integer("ntheta", 128);
        num("nodes_per_unit", 24.0);
        s.push_back(ParamSpec{"annulus", PType::NumberList, V(std::vector<double>{1.0, 2.0})});
        num("clustering", defaults::angular_clustering);
        num("increment_tol", 2e-2);
        num("track_tol", 5e-3);
    }
    return s;
}

bool matches(const Value& v, PType t) {
    switch (t) {
        case PType::Number: return v.index() == 0;
        case PType::Integer: return v.index() == 0 && std::get<double>(v) == std::floor(std::get<double>(v));
        case PType::String: return v.index() == 1 || v.index() == 0;
        case PType::NumberList: return as_numbers(v).has_value();
        case PType::StringList: return as_strings(v).has_value() || v.index() == 0 || v.index() == 2;
    }
    return false;
}

std::string ptype_name(PType t) {
    switch (t) {
        case PType::Number: return "a number";
        case PType::Integer: return "an integer";
        case PType::String: return "a string";
        case PType::NumberList: return "a number list";
        case PType::StringList: return "a list of names";
    }
    return "?";
}

// Canonical in-memory form for a schema type (so "x = 3" and "x = [3]" agree).
Value normalise(const Value& v, PType t) {
    switch (t) {
        case PType::String:
            if (auto* d = std::get_if<double>(&v)) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", *d);
                return Value(std::string(buf));
            }
            return v;
        case PType::NumberList: return Value(*as_numbers(v));
        case PType::StringList: {
            std::vector<std::string> out;
            if (auto s = as_strings(v)) return Value(*s);
            auto nums = *as_numbers(v);
            for (double d : nums) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", d);
                out.emplace_back(buf);
            }
            return Value(out);
        }
        default: return v;
    }
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
    });
}

void read_operator(const RawSection& sec, const std::string& name, Collector& c, ExperimentConfig& cfg) {
    SectionReader r(sec, c);
    OperatorConfig op;
    op.name = name;
    if (!r.get_peek("kind")) c.add(sec.line, "[operator." + name + "] is missing 'kind'");
    r.text("kind", op.kind);
    if (!op.kind.empty() && op.kind != "pLaplacian" && op.kind != "minimalGraph" && op.kind != "custom")
        c.add(r.line_of("kind"), "operator kind must be pLaplacian, minimalGraph or custom, got '" + op.kind + "'");
    if (op.kind == "pLaplacian") {
        r.number("p", op.p);
        if (!(op.p > 1.0)) c.add(r.line_of("p"), "p must exceed 1");
    }
    if (op.kind == "custom") {
        if (!r.get_peek("formula")) c.add(sec.line, "[operator." + name + "] custom operators need 'formula'");
        r.text("formula", op.formula);
        const auto names = formula_names();
        if (!op.formula.empty() && std::find(names.begin(), names.end(), op.formula) == names.end())
            c.add(r.line_of("formula"), "unknown formula '" + op.formula + "'");
        r.number("scale", op.scale);
        r.number("exponent", op.exponent);
        r.number("growth_c", op.constants.growth_c);
        r.number("growth_p", op.constants.growth_p);
        r.number("lower_q", op.constants.lower_q);
        r.number("lower_delta0", op.constants.lower_delta0);
        r.number("lower_dbar", op.constants.lower_dbar);
        r.optional_number("k0", op.k0);
        if (!(op.scale > 0.0)) c.add(r.line_of("scale"), "scale must be positive");
    }
    r.finish();
    cfg.operators.push_back(std::move(op));
}

void read_geometry(const RawSection& sec, Collector& c, ExperimentConfig& cfg) {
    SectionReader r(sec, c);
    auto& g = cfg.geometry;
    r.integer("n", g.n);
    r.number("c", g.c);
    if (g.n < 2) c.add(r.line_of("n"), "dimension n must be at least 2");
    if (!(g.c > 0.0)) c.add(r.line_of("c"), "curvature magnitude c must be positive");
    r.allow_prefix("ideal.");
    r.allow_prefix("geodesic.");
    r.allow_prefix("horosphere.");
    for (const auto& key : sec.order) {
        const auto& e = sec.entries.at(key);
        const auto dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string head = key.substr(0, dot), name = key.substr(dot + 1);
        if (!valid_name(name)) {
            c.add(e.line, "invalid object name '" + name + "'");
            continue;
        }
        if (head == "ideal") {
            auto v = as_numbers(e.value);
            if (!v || v->empty()) {
                c.add(e.line, key + " must be a list of coordinates");
                continue;
            }
            g.ideal_points[name] = *v;
        } else if (head == "geodesic") {
            auto v = as_strings(e.value);
            if (!v || v->size() != 2) {
                c.add(e.line, key + " must name two ideal points");
                continue;
            }
            g.geodesics[name] = {(*v)[0], (*v)[1]};
        } else if (head == "horosphere") {
            auto v = as_strings(e.value);
            std::optional<double> t = v && v->size() == 2 ? parse_number((*v)[1]) : std::nullopt;
            if (!t) {
                c.add(e.line, key + " must be 'ideal point name, signed distance'");
                continue;
            }
            g.horospheres[name] = {(*v)[0], *t};
        } else {
            c.add(e.line, "unknown key '" + key + "' in [geometry]");
        }
    }
    r.finish();
}

void read_numerics(const RawSection& sec, Collector& c, ExperimentConfig& cfg) {
    SectionReader r(sec, c);
    auto& n = cfg.numerics;
    r.number("quad_tol", n.quad_tol);
    r.number("solver_tol", n.solver_tol);
    r.number("residual_tol", n.residual_tol);
    r.number("allowance_factor", n.allowance_factor);
    r.integer("profile_nodes", n.profile_nodes);
    const std::pair<const char*, double> tols[] = {
        {"quad_tol", n.quad_tol}, {"solver_tol", n.solver_tol}, {"residual_tol", n.residual_tol}};
    for (const auto& [key, value] : tols)
        if (!(value > 0.0)) c.add(r.line_of(key), std::string(key) + " must be positive");
    if (!(n.allowance_factor >= 0.0)) c.add(r.line_of("allowance_factor"), "allowance_factor must be >= 0");
    if (n.profile_nodes < 5) c.add(r.line_of("profile_nodes"), "profile_nodes must be at least 5");
    r.finish();
}

void read_global(const RawSection& sec, Collector& c, ExperimentConfig& cfg) {
    SectionReader r(sec, c);
    double seed = 0.0;
    if (r.get_peek("seed")) {
        r.number("seed", seed);
        if (seed < 0.0 || seed != std::floor(seed) || seed > 9.0e15)
            c.add(r.line_of("seed"), "seed must be a non-negative integer");
        else
            cfg.global.seed = static_cast<std::uint64_t>(seed);
    }
    r.text("output", cfg.global.output);
    r.text("title", cfg.global.title);
    r.finish();
}

void read_run(const RawSection& sec, const std::string& name, Collector& c, ExperimentConfig& cfg) {
    RunConfig run;
    run.name = name;
    auto kind_it = sec.entries.find("kind");
    if (kind_it == sec.entries.end()) {
        c.add(sec.line, "[run." + name + "] is missing 'kind'");
        return;
    }
    if (auto* k = std::get_if<std::string>(&kind_it->second.value)) run.kind = *k;
    if (std::find(std::begin(kRunKinds), std::end(kRunKinds), run.kind) == std::end(kRunKinds)) {
        c.add(kind_it->second.line, "unknown experiment kind in [run." + name + "]");
        return;
    }
    const auto schema = run_schema(run.kind);
    for (const auto& key : sec.order) {
        if (key == "kind") continue;
        const auto& e = sec.entries.at(key);
        auto spec = std::find_if(schema.begin(), schema.end(), [&](const ParamSpec& p) { return p.key == key; });
        if (spec == schema.end()) {
            c.add(e.line, "unknown key '" + key + "' for " + run.kind + " runs");
            continue;
        }
        if (!matches(e.value, spec->type)) {
            c.add(e.line, key + " must be " + ptype_name(spec->type) + ", got " + type_name(e.value));
            continue;
        }
        Value v = normalise(e.value, spec->type);
        if (!spec->choices.empty()) {
            const auto& s = std::get<std::string>(v);
            if (std::find(spec->choices.begin(), spec->choices.end(), s) == spec->choices.end()) {
                std::string all;
                for (const auto& ch : spec->choices) all += (all.empty() ? "" : ", ") + ch;
                c.add(e.line, key + " must be one of " + all);
                continue;
            }
        }
        if (key.size() > 4 && key.compare(key.size() - 4, 4, "_tol") == 0 && !(std::get<double>(v) > 0.0))
            c.add(e.line, key + " must be positive");
        run.params[key] = std::move(v);
    }
    for (const auto& p : schema) {
        if (run.params.count(p.key)) continue;
        if (p.required)
            c.add(sec.line, "[run." + name + "] is missing '" + p.key + "'");
        else if (p.fallback)
            run.params[p.key] = *p.fallback;
    }
    cfg.runs.push_back(std::move(run));
}

void cross_check(const ExperimentConfig& cfg, Collector& c, const std::map<std::string, int>& run_lines) {
    const auto& g = cfg.geometry;
    for (const auto& [name, xi] : g.ideal_points) {
        if (static_cast<int>(xi.size()) != g.n) {
            c.add(0, "ideal." + name + " has " + std::to_string(xi.size()) + " coordinates, expected " + std::to_string(g.n));
            continue;
        }
        double norm = 0.0;
        for (double x : xi) norm += x * x;
        if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) c.add(0, "ideal." + name + " is not a unit vector");
    }
    auto need_ideal = [&](const std::string& who, const std::string& id) {
        if (!g.ideal_points.count(id)) c.add(0, who + " refers to undefined ideal point '" + id + "'");
    };
    for (const auto& [name, geo] : g.geodesics) {
        need_ideal("geodesic." + name, geo.from);
        need_ideal("geodesic." + name, geo.to);
        if (geo.from == geo.to) c.add(0, "geodesic." + name + " needs two distinct endpoints");
    }
    for (const auto& [name, h] : g.horospheres) need_ideal("horosphere." + name, h.ideal);

    for (const auto& run : cfg.runs) {
        const int line = run_lines.at(run.name);
        auto need_op = [&](const std::string& op) {
            if (!cfg.find_operator(op)) c.add(line, "[run." + run.name + "] refers to missing section [operator." + op + "]");
        };
        if (run.has("operators"))
            for (const auto& op : run.texts("operators")) need_op(op);
        if (run.has("operator")) need_op(run.text("operator"));
        if (run.has("expect") && run.kind == "classify") {
            if (run.texts("expect").size() != run.texts("operators").size())
                c.add(line, "[run." + run.name + "] expect must list one class per operator");
            for (const auto& e : run.texts("expect"))
                if (e != "RemovableType" && e != "SingularType")
                    c.add(line, "[run." + run.name + "] expect entries must be RemovableType or SingularType");
        }
        auto need_obj = [&](const char* key, const auto& table, const char* what) {
            if (!run.has(key)) return;
            if (!table.count(run.text(key)))
                c.add(line, "[run." + run.name + "] refers to undefined " + what + " '" + run.text(key) + "'");
        };
        need_obj("horosphere", g.horospheres, "horosphere");
        need_obj("geodesic", g.geodesics, "geodesic");
        const std::string barrier = run.has("barrier") ? run.text("barrier") : "";
        const std::string data = run.has("data") ? run.text("data") : "";
        if (run.kind == "residuals" && barrier == "scherk" && !run.has("geodesic"))
            c.add(line, "[run." + run.name + "] scherk residuals need 'geodesic'");
        if (run.kind == "residuals" && barrier == "scherk" && g.n != 2)
            c.add(line, "[run." + run.name + "] scherk residuals are sampled in dimension 2");
        if (run.kind == "residuals" && barrier == "singular" && !run.has("horosphere"))
            c.add(line, "[run." + run.name + "] singular residuals need 'horosphere'");
        if ((run.kind == "disk-solve" || run.kind == "removability-probe") && data == "trace" && !run.has("horosphere"))
            c.add(line, "[run." + run.name + "] trace data need 'horosphere'");
        if ((run.kind == "disk-solve" || run.kind == "removability-probe") && g.n != 2)
            c.add(line, "[run." + run.name + "] disk solves run in dimension 2");
        if (run.kind == "removability-probe") {
            const auto rs = run.numbers("r_sequence");
            if (rs.empty() || !std::is_sorted(rs.begin(), rs.end()) ||
                std::adjacent_find(rs.begin(), rs.end()) != rs.end())
                c.add(line, "[run." + run.name + "] r_sequence must be non-empty and increasing");
            if (run.numbers("annulus").size() != 2) c.add(line, "[run." + run.name + "] annulus must be [lo, hi]");
        }
        if (run.has("table") && run.numbers("table").size() != 3)
            c.add(line, "[run." + run.name + "] table must be [lo, hi, step]");
        if (run.has("range") && run.numbers("range").size() != 2)
            c.add(line, "[run." + run.name + "] range must be [lo, hi]");
        if (run.has("band") && run.numbers("band").size() != 2)
            c.add(line, "[run." + run.name + "] band must be [lo, hi]");
    }
}

// ---------------------------------------------------------------------------
// Serialization

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quote_if_needed(const std::string& s) {
    const bool plain = !s.empty() && !parse_number(s) && s.find_first_of(",#;\"[]=") == std::string::npos &&
                       trim(s).size() == s.size();
    if (plain) return s;
    return "\"" + s + "\"";
}

std::string render(const Value& v) {
    struct {
        std::string operator()(double d) const { return fmt(d); }
        std::string operator()(const std::string& s) const { return quote_if_needed(s); }
        std::string operator()(const std::vector<double>& xs) const {
            std::string out = "[";
            for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
            return out + "]";
        }
        std::string operator()(const std::vector<std::string>& xs) const {
            std::string out = "[";
            for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + quote_if_needed(xs[i]);
            return out + "]";
        }
    } visitor;
    return std::visit(visitor, v);
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::vector<ConfigIssue> issues)
    : Error(code, [&] {
          std::string msg = std::to_string(issues.size()) + " problem(s) in config";
          for (const auto& i : issues) msg += "\n  " + (i.line ? "line " + std::to_string(i.line) + ": " : "") + i.message;
          return msg;
      }()),
      issues_(std::move(issues)) {}

double RunConfig::number(const std::string& key) const { return std::get<double>(params.at(key)); }
int RunConfig::integer(const std::string& key) const { return static_cast<int>(std::get<double>(params.at(key))); }
const std::string& RunConfig::text(const std::string& key) const { return std::get<std::string>(params.at(key)); }
std::vector<double> RunConfig::numbers(const std::string& key) const { return *as_numbers(params.at(key)); }
std::vector<std::string> RunConfig::texts(const std::string& key) const { return *as_strings(params.at(key)); }

const OperatorConfig* ExperimentConfig::find_operator(const std::string& name) const {
    for (const auto& op : operators)
        if (op.name == name) return &op;
    return nullptr;
}

ExperimentConfig parse_config(std::string_view text) {
    Collector parse;
    std::vector<RawSection> sections;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    RawSection* current = nullptr;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                parse.add(line_no, "malformed section header");
                current = nullptr;
                continue;
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            const auto dot = name.find('.');
            const std::string head = name.substr(0, dot);
            const bool named = head == "operator" || head == "run";
            const bool ok = named ? dot != std::string::npos && valid_name(name.substr(dot + 1))
                                  : (name == "global" || name == "geometry" || name == "numerics");
            if (!ok) {
                parse.add(line_no, "unknown section [" + name + "]");
                current = nullptr;
                continue;
            }
            if (!seen.insert(name).second) {
                parse.add(line_no, "duplicate section [" + name + "]");
                current = nullptr;
                continue;
            }
            sections.push_back({name, line_no, {}, {}});
            current = &sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            parse.add(line_no, "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            parse.add(line_no, "missing key before '='");
            continue;
        }
        if (!current) {
            parse.add(line_no, "'" + key + "' appears outside a known section");
            continue;
        }
        std::string why;
        auto value = parse_value(line.substr(eq + 1), why);
        if (!value) {
            parse.add(line_no, "bad value for '" + key + "': " + why);
            continue;
        }
        if (current->entries.count(key)) {
            parse.add(line_no, "duplicate key '" + key + "' in [" + current->name + "]");
            continue;
        }
        current->entries.emplace(key, RawEntry{*value, line_no});
        current->order.push_back(key);
    }
    if (!parse.issues.empty()) throw ConfigError(ErrorCode::ParseError, std::move(parse.issues));

    Collector valid;
    ExperimentConfig cfg;
    std::map<std::string, int> run_lines;
    bool any_operator = false, any_run = false;
    for (const auto& sec : sections) {
        const auto dot = sec.name.find('.');
        const std::string head = sec.name.substr(0, dot);
        if (head == "global") read_global(sec, valid, cfg);
        if (head == "geometry") read_geometry(sec, valid, cfg);
        if (head == "numerics") read_numerics(sec, valid, cfg);
        if (head == "operator") {
            any_operator = true;
            read_operator(sec, sec.name.substr(dot + 1), valid, cfg);
        }
        if (head == "run") {
            any_run = true;
            run_lines[sec.name.substr(dot + 1)] = sec.line;
            read_run(sec, sec.name.substr(dot + 1), valid, cfg);
        }
    }
    if (!any_operator) valid.add(0, "missing [operator.NAME] section");
    if (!any_run) valid.add(0, "missing [run.NAME] section");
    cross_check(cfg, valid, run_lines);
    if (!valid.issues.empty()) throw ConfigError(ErrorCode::ValidationError, std::move(valid.issues));
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[global]\n";
    out << "seed = " << cfg.global.seed << "\n";
    out << "output = " << quote_if_needed(cfg.global.output) << "\n";
    if (!cfg.global.title.empty()) out << "title = " << quote_if_needed(cfg.global.title) << "\n";

    for (const auto& op : cfg.operators) {
        out << "\n[operator." << op.name << "]\n";
        out << "kind = " << op.kind << "\n";
        if (op.kind == "pLaplacian") out << "p = " << fmt(op.p) << "\n";
        if (op.kind == "custom") {
            out << "formula = " << quote_if_needed(op.formula) << "\n";
            out << "scale = " << fmt(op.scale) << "\n";
            out << "exponent = " << fmt(op.exponent) << "\n";
            out << "growth_c = " << fmt(op.constants.growth_c) << "\n";
            out << "growth_p = " << fmt(op.constants.growth_p) << "\n";
            out << "lower_q = " << fmt(op.constants.lower_q) << "\n";
            out << "lower_delta0 = " << fmt(op.constants.lower_delta0) << "\n";
            out << "lower_dbar = " << fmt(op.constants.lower_dbar) << "\n";
            if (op.k0) out << "k0 = " << fmt(*op.k0) << "\n";
        }
    }

    const auto& g = cfg.geometry;
    out << "\n[geometry]\n";
    out << "n = " << g.n << "\n";
    out << "c = " << fmt(g.c) << "\n";
    for (const auto& [name, xi] : g.ideal_points) out << "ideal." << name << " = " << render(Value(xi)) << "\n";
    for (const auto& [name, geo] : g.geodesics) out << "geodesic." << name << " = " << geo.from << ", " << geo.to << "\n";
    for (const auto& [name, h] : g.horospheres) out << "horosphere." << name << " = " << h.ideal << ", " << fmt(h.t) << "\n";

    const auto& n = cfg.numerics;
    out << "\n[numerics]\n";
    out << "quad_tol = " << fmt(n.quad_tol) << "\n";
    out << "solver_tol = " << fmt(n.solver_tol) << "\n";
    out << "residual_tol = " << fmt(n.residual_tol) << "\n";
    out << "allowance_factor = " << fmt(n.allowance_factor) << "\n";
    out << "profile_nodes = " << n.profile_nodes << "\n";

    for (const auto& run : cfg.runs) {
        out << "\n[run." << run.name << "]\n";
        out << "kind = " << run.kind << "\n";
        for (const auto& [key, value] : run.params) out << key << " = " << render(value) << "\n";
    }
    return out.str();
}

OperatorSpec build_operator(const OperatorConfig& op) {
    if (op.kind == "pLaplacian") return make_p_laplacian(op.p);
    if (op.kind == "minimalGraph") return make_minimal_graph();
    if (op.kind == "custom") {
        OperatorSpec spec = make_formula_operator(op.formula, {op.scale, op.exponent}, op.constants, op.k0);
        spec.name = op.name;
        return spec;
    }
    fail(ErrorCode::InvalidParams, "unknown operator kind '" + op.kind + "'");
}

}  // namespace asymlab::cli
