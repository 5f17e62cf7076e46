#include "waveduct/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace waveduct {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw std::runtime_error(os.str());
}

} // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("CsvWriter: need at least one column");
}

void CsvWriter::append(const std::vector<double>& row) {
    if (row.size() != columns_.size())
        throw std::invalid_argument("CsvWriter: row width does not match the column count");
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) body_ += ',';
        body_ += format_double(row[i]);
    }
    body_ += '\n';
    ++n_rows_;
}

std::string CsvWriter::str() const {
    std::string out = "#schema=1\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    out += body_;
    return out;
}

void CsvWriter::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << str();
    if (!f) throw std::runtime_error("write failed: " + path);
}

bool CsvTable::has_column(const std::string& name) const {
    for (const std::string& c : columns)
        if (c == name) return true;
    return false;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return data[i];
    throw std::runtime_error("csv: no column named '" + name + "'");
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header && line[0] == '#') continue;
        std::vector<std::string> fields = split_fields(line);
        if (!have_header) {
            table.columns = fields;
            table.data.assign(fields.size(), {});
            have_header = true;
            continue;
        }
        if (fields.size() != table.columns.size())
            fail_at(origin, line_no, "expected " + std::to_string(table.columns.size()) +
                                         " fields, got " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const char* begin = fields[c].c_str();
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin || *end != '\0')
                fail_at(origin, line_no, "not a number: '" + fields[c] + "'");
            table.data[c].push_back(v);
        }
    }
    if (!have_header) fail_at(origin, line_no == 0 ? 1 : line_no, "missing header row");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open csv: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_csv(buf.str(), path);
}

} // namespace waveduct
