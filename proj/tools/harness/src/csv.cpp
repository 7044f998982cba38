#include "pqbbh_harness/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pqbbh_harness/config.hpp"

namespace pqbbh::harness {

std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Rational& v)
{
    return fmt(to_double(v));
}

std::string fmt(bool v)
{
    return v ? "true" : "false";
}

std::string fmt(std::int64_t v)
{
    return std::to_string(v);
}

void CsvTable::add(std::vector<std::string> fields)
{
    if (fields.size() != header_.size()) {
        throw std::invalid_argument("CsvTable: row width does not match header");
    }
    rows_.push_back(std::move(fields));
}

namespace {

void put_field(std::string& out, const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
}

void put_row(std::string& out, const std::vector<std::string>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        put_field(out, row[i]);
    }
    out += '\n';
}

} // namespace

std::string CsvTable::str() const
{
    std::string out;
    put_row(out, header_);
    for (const auto& r : rows_) {
        put_row(out, r);
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    const std::string text = str();
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!file) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

} // namespace pqbbh::harness
