#ifndef WAVEDUCT_CSV_HPP
#define WAVEDUCT_CSV_HPP

#include <map>
#include <string>
#include <vector>

namespace waveduct {

/* Column-oriented CSV with the fixed schema header
 *   #schema=1
 *   col_a,col_b,...
 * Values print with enough digits to round-trip doubles. */
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void append(const std::vector<double>& row);
    std::string str() const;
    void write_file(const std::string& path) const;
    int rows() const { return n_rows_; }

private:
    std::vector<std::string> columns_;
    std::string body_;
    int n_rows_ = 0;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // column-major: data[c][row]

    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    std::size_t n_rows() const { return columns.empty() ? 0 : data.front().size(); }
};

// Accepts an optional #schema comment line before the header; throws
// std::runtime_error naming the file and line on malformed input.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");

} // namespace waveduct

#endif
