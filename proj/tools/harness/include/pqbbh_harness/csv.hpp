#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pqbbh/scalar.hpp"

namespace pqbbh::harness {

/// %.17g, with "nan", "inf" and "-inf" spelled out.
std::string fmt(double v);
std::string fmt(const Rational& v);
std::string fmt(bool v);
std::string fmt(std::int64_t v);
inline std::string fmt(int v) { return fmt(static_cast<std::int64_t>(v)); }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

class CsvTable
{
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    template <typename... Fields> void row(const Fields&... fields)
    {
        std::vector<std::string> r;
        r.reserve(sizeof...(fields));
        (r.push_back(fmt(fields)), ...);
        add(std::move(r));
    }

    /// Throws std::invalid_argument when the width differs from the header.
    void add(std::vector<std::string> fields);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    /// RFC 4180 text with LF line endings.
    std::string str() const;

    /// Throws IoError.
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace pqbbh::harness
