#pragma once

#include "latsym/calculus.hpp"
#include "latsym/system.hpp"
#include "latsym/verify.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latsym {

class CatalogError : public std::runtime_error {
public:
    explicit CatalogError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NamedChar {
    std::string name;
    Characteristic chi;
    std::optional<std::vector<Expr>> R;   // divergence tuple, one entry per axis
    bool on_el_system = false;            // declared with `vchar`
};

struct NamedLaw {
    std::string name;
    ConservationLaw law;
    std::string paired_char;   // empty when unpaired
};

struct Expectation {
    std::string check;
    std::vector<std::string> args;
    std::string expected;   // identical | solutions | holds | fails
};

struct SimConfig {
    std::map<std::string, std::vector<double>> initial;   // p=1 seeds, optional
    std::size_t steps = 20;
    std::size_t rows = 4;
    std::size_t cols = 4;
};

struct CatalogEntry {
    std::string id;
    std::string title;
    DifferenceSystem system;
    std::optional<Expr> implicit_form;
    std::vector<NamedChar> characteristics;
    std::vector<NamedLaw> laws;
    std::map<std::string, std::vector<Expr>> ansatz;
    std::optional<Lagrangian> lagrangian;
    std::optional<DifferenceSystem> explicit_el_system;
    SimConfig sim;
    std::vector<Expectation> expectations;

    const DifferenceSystem& el_system() const {
        return explicit_el_system ? *explicit_el_system : system;
    }
    const NamedChar* find_char(const std::string& name) const;
    const NamedLaw* find_law(const std::string& name) const;
};

/// Directory holding the shipped .entry files; the LATSYM_CATALOG_DIR
/// environment variable overrides the built-in default.
std::string default_catalog_dir();

std::vector<std::string> list_entries(const std::string& dir = "");
CatalogEntry load_entry(const std::string& id, const std::string& dir = "");
CatalogEntry load_entry_file(const std::string& path);

struct RunRow {
    std::string entry;
    std::string check;
    std::string object;
    std::string expected;
    std::string failing_part;   // label of the first failing sub-check
    Verdict verdict;
    bool ok = false;
};

std::string actual_token(const Verdict& v);
bool expectation_met(const std::string& expected, const Verdict& v);

/// One row per expectation (plus a solved-form validation row when the entry
/// stores an implicit equation), diffed against the expected verdicts.
std::vector<RunRow> run_entry(const CatalogEntry& entry, const CheckOptions& opt);

/// Runs a single expectation; `expected` in the returned row is "-" when the
/// entry does not pin a verdict for this check.
RunRow run_one(const CatalogEntry& entry, const std::string& check,
               const std::vector<std::string>& args, const CheckOptions& opt);

} // namespace latsym
