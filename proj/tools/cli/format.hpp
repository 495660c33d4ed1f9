#ifndef QDA_CLI_FORMAT_HPP
#define QDA_CLI_FORMAT_HPP

#include <optional>
#include <string>
#include <vector>

namespace qda::cli {

/// One sweep output table: a shared axis column plus named value columns.
/// Cells are optional so per-point failures can stay blank without
/// disturbing the schema.
struct Table {
    std::string axis_name;
    std::vector<std::string> columns;
    std::vector<double> axis;
    std::vector<std::vector<std::optional<double>>> rows; // rows[i][col]
};

/// Shortest round-trip decimal form (17 significant digits, '.' separator).
std::string format_double(double v);

/// Serialize as CSV: header row, ',' delimiter, '\n' line endings, blank
/// cells for missing values.
std::string to_csv(const Table& table);

/// Render a static line chart, one polyline per column, linear axes,
/// a small legend naming each series. Missing cells split the polyline.
std::string to_svg(const Table& table);

void write_file(const std::string& path, const std::string& contents);

} // namespace qda::cli

#endif
