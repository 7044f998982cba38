#include "pqbbh_harness/discrepancy.hpp"

#include <cmath>

namespace pqbbh::harness {

bool DiscrepancyReport::check(const std::string& formula, const std::string& location, const std::string& n,
                              const std::string& x, double printed, double oracle, const std::string& note)
{
    const double gap = relative_gap(printed, oracle);
    if (!(gap > kFloatDiscrepancyTolerance)) {
        return false;
    }
    entries_.push_back({formula, location, "float", n, x, printed, oracle, std::fabs(printed - oracle), gap, note});
    return true;
}

bool DiscrepancyReport::check(const std::string& formula, const std::string& location, const std::string& n,
                              const std::string& x, const Rational& printed, const Rational& oracle,
                              const std::string& note)
{
    if (printed == oracle) {
        return false;
    }
    const Rational diff = abs(printed - oracle);
    entries_.push_back({formula, location, "rational", n, x, to_double(printed), to_double(oracle), to_double(diff),
                        to_double(relative_gap(printed, oracle)), note});
    return true;
}

void DiscrepancyReport::append(const DiscrepancyReport& other)
{
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

CsvTable DiscrepancyReport::table() const
{
    CsvTable t({"formula", "location", "mode", "n", "x", "printed", "oracle", "abs_gap", "rel_gap", "note"});
    for (const auto& e : entries_) {
        t.row(e.formula, e.location, e.mode, e.n, e.x, e.printed, e.oracle, e.abs_gap, e.rel_gap, e.note);
    }
    return t;
}

} // namespace pqbbh::harness
