#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gstars/graph.hpp"

namespace gstars {

/// Parse/format errors carry the offending file and, when known, line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Edge-list text format: one "i j weight" triple per line, 1-based, i > j.
/// Weight defaults to 1 when the graph has no weights attached.
void write_edge_list(const std::string& path, const UndirectedGraph& g,
                     const Eigen::MatrixXd* weights = nullptr);

/// Reads an edge list. If p == 0 the node count is inferred from the
/// largest index seen.
UndirectedGraph read_edge_list(const std::string& path, int p = 0);

/// Dense CSV, row per line, %.17g round-trip formatting.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Data matrix CSV (rows = samples). A first line that fails numeric
/// parsing is treated as a header. NaN entries are an error.
Eigen::MatrixXd read_data_csv(const std::string& path);

std::string format_double(double v);

} // namespace gstars
