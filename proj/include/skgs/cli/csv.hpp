#pragma once

#include <string>
#include <utility>
#include <vector>

namespace skgs::cli {

/// "%.17g"; NaN and infinities as nan / inf / -inf.
std::string format_number(double x);

/// A CSV document: a "# "-prefixed INI block, one header row, data rows
/// and "#" summary lines at the end. Everything is kept in memory and
/// written in one go, with LF line endings.
class CsvDocument {
public:
    void set_metadata(std::string ini) { meta_ = std::move(ini); }
    void set_columns(std::vector<std::string> names);
    void add_row(const std::vector<double>& values);
    void add_footer(const std::string& line);

    const std::string& metadata() const { return meta_; }
    std::string str() const;

private:
    std::string meta_;
    std::vector<std::string> columns_;
    std::string body_;
    std::vector<std::string> footer_;
};

/// Writes through a temporary file and a rename; IoError on failure.
void write_file(const std::string& path, const std::string& text);

/// The leading comment block of a CSV file written by this tool, with the
/// "# " prefixes stripped, i.e. an INI document.
std::string read_metadata(const std::string& path);

/// Simple reader for tests and replay checks: comment lines skipped.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> footer;  // comment lines after the header, '#' removed

    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace skgs::cli
