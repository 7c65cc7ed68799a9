#include "skgs/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skgs/error.hpp"

namespace skgs::cli {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvDocument::set_columns(std::vector<std::string> names) { columns_ = std::move(names); }

void CsvDocument::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) {
        throw Error("csv: row has " + std::to_string(values.size()) + " fields, header has " +
                    std::to_string(columns_.size()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) body_ += ',';
        body_ += format_number(values[i]);
    }
    body_ += '\n';
}

void CsvDocument::add_footer(const std::string& line) { footer_.push_back(line); }

std::string CsvDocument::str() const {
    std::string out;
    std::istringstream meta(meta_);
    std::string line;
    while (std::getline(meta, line)) {
        out += line.empty() ? "#\n" : "# " + line + "\n";
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    out += body_;
    for (const std::string& f : footer_) out += "# " + f + "\n";
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    if (path.empty()) throw UsageError("output path is empty");
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << text;
        out.flush();
        if (!out) throw IoError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

std::string read_metadata(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        if (line.size() >= 2 && line[1] == ' ') {
            out += line.substr(2);
        } else {
            out += line.substr(1);
        }
        out += '\n';
    }
    if (out.empty()) throw UsageError("'" + path + "' has no metadata block");
    return out;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] != name) continue;
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.at(j));
        return out;
    }
    throw UsageError("csv: no column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            if (header) t.footer.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header) {
            t.columns = cells;
            header = true;
            continue;
        }
        std::vector<double> row;
        for (const std::string& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    if (!header) throw UsageError("'" + path + "' has no header row");
    return t;
}

}  // namespace skgs::cli
