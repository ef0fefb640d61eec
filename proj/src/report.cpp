#include "latsym/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace latsym {

using nlohmann::json;

Format parse_format(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw std::invalid_argument("unknown format " + s + " (have text, json, csv)");
}

namespace {

json witness_json(const Environment& env) {
    json w;
    w["point"] = env.point;
    json vals = json::object();
    for (const auto& [coord, q] : env.values) vals[coord.first + coord.second.str()] = to_string(q);
    w["values"] = vals;
    json pars = json::object();
    for (const auto& [name, q] : env.params) pars[name] = to_string(q);
    w["params"] = pars;
    return w;
}

json row_json(const RunRow& r, const CheckOptions& opt) {
    json j;
    j["check"] = r.check;
    j["entry"] = r.entry;
    j["object"] = r.object;
    j["status"] = actual_token(r.verdict);
    j["expected"] = r.expected;
    j["ok"] = r.ok;
    j["exact"] = r.verdict.exact;
    j["trials"] = r.verdict.trials;
    j["max_residual"] = r.verdict.max_residual;
    j["seed"] = opt.seed;
    if (!r.failing_part.empty()) j["failing_part"] = r.failing_part;
    if (r.verdict.witness) j["witness"] = witness_json(*r.verdict.witness);
    return j;
}

void sort_rows(std::vector<RunRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
        return std::tie(a.entry, a.check, a.object) < std::tie(b.entry, b.check, b.object);
    });
}

std::string residual_str(double r) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << r;
    return os.str();
}

} // namespace

std::string render_report(std::vector<RunRow> rows, const CheckOptions& opt, Format fmt) {
    sort_rows(rows);
    if (fmt == Format::Json) {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(row_json(r, opt));
        return arr.dump(2) + "\n";
    }
    if (fmt == Format::Csv) {
        std::ostringstream os;
        os << "entry,check,object,status,expected,ok,exact,trials,max_residual,seed\n";
        for (const auto& r : rows)
            os << r.entry << ',' << r.check << ',' << r.object << ',' << actual_token(r.verdict)
               << ',' << r.expected << ',' << (r.ok ? 1 : 0) << ',' << (r.verdict.exact ? 1 : 0)
               << ',' << r.verdict.trials << ',' << residual_str(r.verdict.max_residual) << ','
               << opt.seed << '\n';
        return os.str();
    }
    std::ostringstream os;
    std::size_t failures = 0;
    for (const auto& r : rows) {
        os << (r.ok ? "[ ok ] " : "[FAIL] ") << r.entry << " " << r.check;
        if (!r.object.empty()) os << " " << r.object;
        os << ": " << actual_token(r.verdict);
        if (r.expected != "-") os << " (expected " << r.expected << ")";
        if (!r.failing_part.empty() && !r.verdict.holds()) os << " at " << r.failing_part;
        if (!r.verdict.exact) os << "  residual=" << residual_str(r.verdict.max_residual);
        os << "\n";
        if (!r.ok) ++failures;
        if (!r.ok && r.verdict.witness) {
            const Environment& env = *r.verdict.witness;
            os << "       witness: point=(";
            for (std::size_t i = 0; i < env.point.size(); ++i)
                os << (i ? "," : "") << env.point[i];
            os << ")";
            for (const auto& [coord, q] : env.values)
                os << " " << coord.first << coord.second.str() << "=" << to_string(q);
            for (const auto& [name, q] : env.params) os << " " << name << "=" << to_string(q);
            os << "\n";
        }
    }
    os << rows.size() - failures << "/" << rows.size() << " checks as expected (seed "
       << opt.seed << ")\n";
    return os.str();
}

std::string render_drift(const std::vector<DriftRow>& rows, std::uint64_t seed, Format fmt) {
    if (fmt == Format::Json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json j;
            j["entry"] = r.entry;
            j["law"] = r.law;
            j["max_residual"] = r.report.max_residual;
            j["mean_residual"] = r.report.mean_residual;
            j["sites"] = r.report.sites.size();
            j["seed"] = seed;
            arr.push_back(j);
        }
        return arr.dump(2) + "\n";
    }
    if (fmt == Format::Csv) {
        std::ostringstream os;
        os << "entry,law,site,values,residual\n";
        for (const auto& r : rows)
            for (const auto& s : r.report.sites) {
                os << r.entry << ',' << r.law << ',';
                for (std::size_t i = 0; i < s.site.size(); ++i) os << (i ? ";" : "") << s.site[i];
                os << ',';
                for (std::size_t i = 0; i < s.values.size(); ++i) {
                    os << (i ? ";" : "") << std::setprecision(17) << s.values[i];
                }
                os << ',' << residual_str(s.residual) << '\n';
            }
        return os.str();
    }
    std::ostringstream os;
    for (const auto& r : rows)
        os << r.entry << " " << r.law << ": max drift " << residual_str(r.report.max_residual)
           << ", mean " << residual_str(r.report.mean_residual) << " over "
           << r.report.sites.size() << " sites\n";
    return os.str();
}

std::string render_noether(const std::vector<NoetherRow>& rows, const CheckOptions& opt,
                           Format fmt) {
    if (fmt == Format::Json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json j;
            j["entry"] = r.entry;
            j["characteristic"] = r.characteristic;
            j["axis"] = r.axis;
            j["component"] = r.component;
            j["status"] = actual_token(r.verdict);
            j["seed"] = opt.seed;
            arr.push_back(j);
        }
        return arr.dump(2) + "\n";
    }
    std::ostringstream os;
    for (const auto& r : rows)
        os << r.entry << " " << r.characteristic << " P^" << r.axis << " = " << r.component
           << "   [" << actual_token(r.verdict) << "]\n";
    return os.str();
}

} // namespace latsym
