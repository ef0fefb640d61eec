#include "latsym/catalog.hpp"
#include "latsym/parse.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace latsym {

namespace fs = std::filesystem;

const NamedChar* CatalogEntry::find_char(const std::string& name) const {
    for (const auto& c : characteristics)
        if (c.name == name) return &c;
    return nullptr;
}

const NamedLaw* CatalogEntry::find_law(const std::string& name) const {
    for (const auto& l : laws)
        if (l.name == name) return &l;
    return nullptr;
}

std::string default_catalog_dir() {
    if (const char* env = std::getenv("LATSYM_CATALOG_DIR")) return env;
#ifdef LATSYM_CATALOG_DIR
    return LATSYM_CATALOG_DIR;
#else
    return "catalog";
#endif
}

std::vector<std::string> list_entries(const std::string& dir) {
    std::string d = dir.empty() ? default_catalog_dir() : dir;
    std::vector<std::string> ids;
    if (!fs::is_directory(d)) throw CatalogError("catalog directory not found: " + d);
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".entry") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

CatalogEntry load_entry(const std::string& id, const std::string& dir) {
    std::string d = dir.empty() ? default_catalog_dir() : dir;
    return load_entry_file((fs::path(d) / (id + ".entry")).string());
}

namespace {

struct Directive {
    std::vector<std::string> head;
    std::string value;
    int line;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Rational parse_rational_token(const std::string& tok) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) return Rational(std::stol(tok));
    return make_rational(std::stol(tok.substr(0, slash)), std::stol(tok.substr(slash + 1)));
}

/// Splits "u[1,-2]" into name and offset.
std::pair<std::string, MultiIndex> parse_target(const std::string& tok, int line) {
    auto lb = tok.find('[');
    if (lb == std::string::npos || tok.back() != ']')
        throw CatalogError("line " + std::to_string(line) + ": expected var[offsets], got " + tok);
    std::string name = tok.substr(0, lb);
    std::string inner = tok.substr(lb + 1, tok.size() - lb - 2);
    std::vector<int> offs;
    std::istringstream in(inner);
    std::string piece;
    while (std::getline(in, piece, ',')) offs.push_back(std::stoi(piece));
    return {name, MultiIndex(std::move(offs))};
}

struct Builder {
    CatalogEntry entry;
    std::string path;

    std::size_t dim = 1;
    std::vector<std::string> vars;
    std::vector<std::string> lag_vars;
    std::vector<std::string> param_names;

    std::vector<SolvedRule> rules, elrules;
    std::map<std::string, Domain> domains, eldomains;
    std::map<std::string, ParamSpec> params;
    std::vector<std::pair<std::string, std::string>> distinct, distinct_abs;
    std::optional<Expr> lag_density;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw CatalogError(path + ":" + std::to_string(line) + ": " + msg);
    }

    ParseContext main_ctx() const {
        ParseContext ctx(dim);
        ctx.variables.insert(vars.begin(), vars.end());
        ctx.params.insert(param_names.begin(), param_names.end());
        return ctx;
    }

    ParseContext lag_ctx() const {
        ParseContext ctx(dim);
        const auto& lv = lag_vars.empty() ? vars : lag_vars;
        ctx.variables.insert(lv.begin(), lv.end());
        ctx.params.insert(param_names.begin(), param_names.end());
        return ctx;
    }

    Expr parse_in(const std::string& text, const ParseContext& ctx, int line) const {
        try {
            return parse_expr(text, ctx);
        } catch (const ParseError& e) {
            fail(line, std::string("parse error: ") + e.what());
        }
    }

    NamedChar& chr(const std::string& name, bool el_side) {
        for (auto& c : entry.characteristics)
            if (c.name == name) return c;
        entry.characteristics.push_back(NamedChar{name, {}, std::nullopt, el_side});
        return entry.characteristics.back();
    }

    NamedLaw& law(const std::string& name) {
        for (auto& l : entry.laws)
            if (l.name == name) return l;
        entry.laws.push_back(NamedLaw{name, {}, ""});
        return entry.laws.back();
    }

    void law_component(NamedLaw& l, std::size_t index, Expr e, int line) {
        if (l.law.components.size() < index + 1) l.law.components.resize(index + 1);
        if (stencil(l.law.components[index]).empty() && l.law.components[index].is_zero_literal())
            l.law.components[index] = std::move(e);
        else
            fail(line, "duplicate component for law " + l.name);
    }

    void handle(const Directive& d) {
        const auto& h = d.head;
        const std::string& key = h[0];
        int line = d.line;

        if (key == "id") { entry.id = trim(d.value); return; }
        if (key == "title") { entry.title = trim(d.value); return; }
        if (key == "dim") { dim = std::stoul(d.value); return; }
        if (key == "vars") { vars = split_ws(d.value); return; }
        if (key == "lagrangian-vars") { lag_vars = split_ws(d.value); return; }
        if (key == "params") {
            for (const auto& p : split_ws(d.value)) {
                param_names.push_back(p);
                params.emplace(p, ParamSpec{});
            }
            return;
        }
        if (key == "param") {
            if (h.size() != 2) fail(line, "param needs a name");
            ParamSpec& spec = params[h[1]];
            auto toks = split_ws(d.value);
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (toks[i] == "positive") spec.positive = true;
                else if (toks[i] == "nonzero") { /* default */ }
                else if (toks[i] == "exclude-unit") spec.exclude_unit = true;
                else if (toks[i] == "fixed" && i + 1 < toks.size())
                    spec.fixed = parse_rational_token(toks[++i]);
                else fail(line, "unknown parameter flag " + toks[i]);
            }
            return;
        }
        if (key == "distinct") {
            auto toks = split_ws(d.value);
            if (toks.size() != 2) fail(line, "distinct needs two names");
            distinct.emplace_back(toks[0], toks[1]);
            return;
        }
        if (key == "distinct-abs") {
            auto toks = split_ws(d.value);
            if (toks.size() != 2) fail(line, "distinct-abs needs two names");
            distinct_abs.emplace_back(toks[0], toks[1]);
            return;
        }
        if (key == "domain" || key == "eldomain") {
            if (h.size() != 2) fail(line, "domain needs a variable");
            Domain dom = trim(d.value) == "positive" ? Domain::Positive : Domain::NonzeroRational;
            (key == "domain" ? domains : eldomains)[h[1]] = dom;
            return;
        }
        if (key == "implicit") {
            entry.implicit_form = parse_in(d.value, main_ctx(), line);
            return;
        }
        if (key == "rule" || key == "elrule") {
            if (h.size() != 2) fail(line, "rule needs a target var[offsets]");
            auto [var, top] = parse_target(h[1], line);
            Expr rhs = parse_in(d.value, key == "rule" ? main_ctx() : lag_ctx(), line);
            (key == "rule" ? rules : elrules).push_back(SolvedRule{var, top, simplify(rhs)});
            return;
        }
        if (key == "lagrangian") {
            lag_density = parse_in(d.value, lag_ctx(), line);
            return;
        }
        if (key == "char" || key == "vchar") {
            if (h.size() < 2) fail(line, "char needs a name");
            bool el_side = key == "vchar";
            NamedChar& c = chr(h[1], el_side);
            const ParseContext ctx = el_side ? lag_ctx() : main_ctx();
            if (h.size() == 2) {
                // Shorthand: the single dependent variable of that side.
                const auto& side_vars = el_side && !lag_vars.empty() ? lag_vars : vars;
                if (side_vars.size() != 1)
                    fail(line, "component shorthand needs exactly one variable");
                c.chi.components[side_vars[0]] = parse_in(d.value, ctx, line);
                return;
            }
            if (h.size() == 3 && h[2] == "R") {
                std::vector<Expr> R(dim, Expr::integer(0));
                R[0] = parse_in(d.value, ctx, line);
                c.R = std::move(R);
                return;
            }
            if (h.size() == 3 && h[2].size() == 2 && h[2][0] == 'R' && std::isdigit(h[2][1])) {
                std::size_t axis = static_cast<std::size_t>(h[2][1] - '0');
                if (axis < 1 || axis > dim) fail(line, "R axis out of range");
                if (!c.R) c.R = std::vector<Expr>(dim, Expr::integer(0));
                (*c.R)[axis - 1] = parse_in(d.value, ctx, line);
                return;
            }
            if (h.size() == 4 && h[2] == "param") {
                c.chi.param_components[h[3]] = parse_in(d.value, ctx, line);
                return;
            }
            if (h.size() == 3) {
                c.chi.components[h[2]] = parse_in(d.value, ctx, line);
                return;
            }
            fail(line, "malformed char directive");
        }
        if (key == "law") {
            if (h.size() != 3) fail(line, "law needs a name and a component key");
            NamedLaw& l = law(h[1]);
            if (h[2] == "char") { l.paired_char = trim(d.value); return; }
            Expr e = parse_in(d.value, main_ctx(), line);
            if (h[2] == "P") law_component(l, 0, std::move(e), line);
            else if (h[2] == "F") law_component(l, 0, std::move(e), line);
            else if (h[2] == "G") law_component(l, 1, std::move(e), line);
            else fail(line, "unknown law component " + h[2]);
            return;
        }
        if (key == "ansatz") {
            if (h.size() != 2) fail(line, "ansatz needs a characteristic name");
            std::vector<Expr> coords;
            std::string piece;
            std::istringstream in(d.value);
            while (std::getline(in, piece, '|')) {
                piece = trim(piece);
                if (!piece.empty()) coords.push_back(parse_in(piece, main_ctx(), line));
            }
            entry.ansatz[h[1]] = std::move(coords);
            return;
        }
        if (key == "expect") {
            if (h.size() < 2) fail(line, "expect needs a check name");
            Expectation ex;
            ex.check = h[1];
            ex.args.assign(h.begin() + 2, h.end());
            ex.expected = trim(d.value);
            entry.expectations.push_back(std::move(ex));
            return;
        }
        if (key == "sim") {
            if (h.size() >= 2 && h[1] == "steps") { entry.sim.steps = std::stoul(d.value); return; }
            if (h.size() >= 2 && h[1] == "grid") {
                auto toks = split_ws(d.value);
                if (toks.size() != 2) fail(line, "sim grid needs two sizes");
                entry.sim.rows = std::stoul(toks[0]);
                entry.sim.cols = std::stoul(toks[1]);
                return;
            }
            if (h.size() == 3 && h[1] == "initial") {
                std::vector<double> vals;
                for (const auto& t : split_ws(d.value)) vals.push_back(std::stod(t));
                entry.sim.initial[h[2]] = std::move(vals);
                return;
            }
            fail(line, "malformed sim directive");
        }
        fail(line, "unknown directive " + key);
    }

    void finish() {
        if (entry.id.empty()) throw CatalogError(path + ": missing id");
        if (entry.implicit_form && rules.empty()) {
            if (vars.size() != 1)
                throw CatalogError(path + ": implicit form needs exactly one variable");
            MultiIndex top(std::vector<int>(dim, 1));
            Expr omega = solve_affine_for_top(*entry.implicit_form, vars[0], top);
            rules.push_back(SolvedRule{vars[0], top, omega});
        }
        entry.system.dim = dim;
        entry.system.rules = rules;
        entry.system.domains = domains;
        entry.system.params = params;
        entry.system.distinct = distinct;
        entry.system.distinct_abs = distinct_abs;
        entry.system.validate();
        if (!elrules.empty()) {
            DifferenceSystem el;
            el.dim = dim;
            el.rules = elrules;
            el.domains = eldomains;
            el.params = params;
            el.distinct = distinct;
            el.distinct_abs = distinct_abs;
            el.validate();
            entry.explicit_el_system = std::move(el);
        }
        if (lag_density) entry.lagrangian = Lagrangian(simplify(*lag_density));
    }
};

} // namespace

CatalogEntry load_entry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open " + path);
    Builder b;
    b.path = path;

    std::vector<Directive> directives;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        auto colon = s.find(':');
        if (colon == std::string::npos) throw CatalogError(b.path + ":" + std::to_string(line) + ": expected 'key: value'");
        Directive d;
        d.head = split_ws(s.substr(0, colon));
        d.value = trim(s.substr(colon + 1));
        d.line = line;
        if (d.head.empty()) throw CatalogError(b.path + ":" + std::to_string(line) + ": empty directive");
        directives.push_back(std::move(d));
    }

    // Declarations first so expressions can reference them regardless of order.
    for (const auto& d : directives) {
        const std::string& k = d.head[0];
        if (k == "id" || k == "title" || k == "dim" || k == "vars" || k == "params" ||
            k == "param" || k == "lagrangian-vars" || k == "distinct" || k == "distinct-abs" ||
            k == "domain" || k == "eldomain")
            b.handle(d);
    }
    for (const auto& d : directives) {
        const std::string& k = d.head[0];
        if (!(k == "id" || k == "title" || k == "dim" || k == "vars" || k == "params" ||
              k == "param" || k == "lagrangian-vars" || k == "distinct" || k == "distinct-abs" ||
              k == "domain" || k == "eldomain"))
            b.handle(d);
    }
    b.finish();
    return b.entry;
}

// ---------------------------------------------------------------------------
// Check dispatch

std::string actual_token(const Verdict& v) {
    switch (v.status) {
        case Status::HoldsIdentically: return "identical";
        case Status::HoldsOnSolutions: return "solutions";
        case Status::Fails: return "fails";
    }
    return "?";
}

bool expectation_met(const std::string& expected, const Verdict& v) {
    if (expected == "holds") return v.holds();
    return actual_token(v) == expected;
}

namespace {

CheckResult dispatch(const CatalogEntry& e, const std::string& check,
                     const std::vector<std::string>& args, const CheckOptions& opt) {
    auto need_char = [&](const std::string& name) -> const NamedChar& {
        const NamedChar* c = e.find_char(name);
        if (!c) throw CatalogError(e.id + ": unknown characteristic " + name);
        return *c;
    };
    auto need_law = [&](const std::string& name) -> const NamedLaw& {
        const NamedLaw* l = e.find_law(name);
        if (!l) throw CatalogError(e.id + ": unknown conservation law " + name);
        return *l;
    };
    auto need_lagrangian = [&]() -> const Lagrangian& {
        if (!e.lagrangian) throw CatalogError(e.id + " has no Lagrangian");
        return *e.lagrangian;
    };
    auto arg = [&](std::size_t i) -> const std::string& {
        if (i >= args.size()) throw CatalogError(e.id + ": check " + check + " is missing arguments");
        return args[i];
    };

    if (check == "symmetry") {
        const NamedChar& c = need_char(arg(0));
        return check_symmetry(c.on_el_system ? e.el_system() : e.system, c.chi, opt);
    }
    if (check == "claw") return check_conservation_law(e.system, need_law(arg(0)).law, opt);
    if (check == "variational") {
        const NamedChar& c = need_char(arg(0));
        return check_variational_symmetry(need_lagrangian(), c.chi, c.R ? &*c.R : nullptr, opt);
    }
    if (check == "association") {
        const NamedChar& c = need_char(arg(0));
        return check_association(e.system, c.chi, need_law(arg(1)).law, opt);
    }
    if (check == "reduction") {
        const NamedLaw& l = need_law(arg(0));
        if (l.law.dim() != 2) throw CatalogError("reduction needs a two-component law");
        return check_three_point_reduction(e.system, l.law.F(), l.law.G(), opt);
    }
    if (check == "ansatz") {
        auto it = e.ansatz.find(arg(0));
        if (it == e.ansatz.end()) throw CatalogError(e.id + ": no ansatz for " + arg(0));
        return check_invariant_ansatz(need_char(arg(0)).chi, it->second, opt);
    }
    if (check == "theorem1") {
        const NamedChar& c = need_char(arg(0));
        return check_theorem1_inheritance(need_lagrangian(), c.chi, e.el_system(), opt);
    }
    if (check == "theorem2") {
        const NamedChar& c = need_char(arg(0));
        return check_theorem2(need_lagrangian(), c.chi, c.R ? &*c.R : nullptr, e.el_system(), opt);
    }
    if (check == "elsym") {
        const NamedChar& c = need_char(arg(0));
        return check_el_symmetry_inheritance(need_lagrangian(), c.chi, e.el_system(), opt);
    }
    if (check == "noether") {
        const NamedChar& c = need_char(arg(0));
        return check_noether_identity(need_lagrangian(), c.chi, opt);
    }
    throw CatalogError("unknown check kind " + check);
}

std::string first_failing_part(const CheckResult& r) {
    for (const auto& part : r.parts)
        if (!part.verdict.holds()) return part.label;
    return "";
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += " ";
        s += x;
    }
    return s;
}

} // namespace

RunRow run_one(const CatalogEntry& entry, const std::string& check,
               const std::vector<std::string>& args, const CheckOptions& opt) {
    RunRow row;
    row.entry = entry.id;
    row.check = check;
    row.object = join(args);
    row.expected = "-";
    for (const auto& ex : entry.expectations)
        if (ex.check == check && ex.args == args) row.expected = ex.expected;
    CheckResult result = dispatch(entry, check, args, opt);
    row.verdict = result.combined;
    row.failing_part = first_failing_part(result);
    row.ok = row.expected == "-" ? row.verdict.holds() : expectation_met(row.expected, row.verdict);
    return row;
}

std::vector<RunRow> run_entry(const CatalogEntry& entry, const CheckOptions& opt) {
    std::vector<RunRow> rows;
    if (entry.implicit_form) {
        // Solved form must satisfy the implicit equation identically.
        const SolvedRule& r = entry.system.rules.at(0);
        Expr back = substitute_dependents(*entry.implicit_form,
                                          [&](const std::string& v, const MultiIndex& J)
                                              -> std::optional<Expr> {
                                              if (v == r.var && J == r.top) return r.rhs;
                                              return std::nullopt;
                                          });
        RunRow row;
        row.entry = entry.id;
        row.check = "solved-form";
        row.object = r.var + r.top.str();
        row.expected = "identical";
        row.verdict = is_zero(back, nullptr, opt);
        row.ok = expectation_met(row.expected, row.verdict);
        rows.push_back(std::move(row));
    }
    for (const auto& ex : entry.expectations) {
        RunRow row;
        row.entry = entry.id;
        row.check = ex.check;
        row.object = join(ex.args);
        row.expected = ex.expected;
        CheckResult result = dispatch(entry, ex.check, ex.args, opt);
        row.verdict = result.combined;
        row.failing_part = first_failing_part(result);
        row.ok = expectation_met(ex.expected, row.verdict);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace latsym
