#pragma once

#include "latsym/catalog.hpp"
#include "latsym/simulate.hpp"

#include <string>
#include <vector>

namespace latsym {

enum class Format { Text, Json, Csv };

Format parse_format(const std::string& s);

/// Rows sorted by (entry, check, object); identical inputs and seed give
/// byte-identical output in every format.
std::string render_report(std::vector<RunRow> rows, const CheckOptions& opt, Format fmt);

struct DriftRow {
    std::string entry;
    std::string law;
    DriftReport report;
};

std::string render_drift(const std::vector<DriftRow>& rows, std::uint64_t seed, Format fmt);

/// Renders a constructed Noether component table (cmd `noether`).
struct NoetherRow {
    std::string entry;
    std::string characteristic;
    int axis;
    std::string component;   // rendered expression
    Verdict verdict;         // divergence check of the constructed tuple
};

std::string render_noether(const std::vector<NoetherRow>& rows, const CheckOptions& opt, Format fmt);

} // namespace latsym
