#pragma once

// Printed-vs-oracle mismatches.  An entry is recorded only when the two values
// differ: at all in Rational mode, by more than 1e-12 relative in Float mode.

#include <string>
#include <vector>

#include "pqbbh/scalar.hpp"
#include "pqbbh_harness/csv.hpp"

namespace pqbbh::harness {

struct DiscrepancyEntry
{
    std::string formula;
    std::string location;
    std::string mode;
    std::string n;
    std::string x;
    double printed = 0.0;
    double oracle = 0.0;
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    std::string note;
};

inline constexpr double kFloatDiscrepancyTolerance = 1e-12;

class DiscrepancyReport
{
public:
    /// Returns true when an entry was recorded.
    bool check(const std::string& formula, const std::string& location, const std::string& n,
               const std::string& x, double printed, double oracle, const std::string& note = {});
    bool check(const std::string& formula, const std::string& location, const std::string& n,
               const std::string& x, const Rational& printed, const Rational& oracle, const std::string& note = {});

    void append(const DiscrepancyReport& other);

    const std::vector<DiscrepancyEntry>& entries() const { return entries_; }

    CsvTable table() const;

private:
    std::vector<DiscrepancyEntry> entries_;
};

} // namespace pqbbh::harness
