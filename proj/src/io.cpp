#include "gstars/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gstars {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_edge_list(const std::string& path, const UndirectedGraph& g,
                     const Eigen::MatrixXd* weights) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    for (auto [i, j] : g.edges()) {
        const double w = weights ? (*weights)(i, j) : 1.0;
        out << (i + 1) << ' ' << (j + 1) << ' ' << format_double(w) << '\n';
    }
}

UndirectedGraph read_edge_list(const std::string& path, int p) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    int lineno = 0, maxnode = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        double w = 0;
        if (!(ls >> i >> j)) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'i j weight'");
        }
        ls >> w; // weight optional
        if (i <= j || j < 1)
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": edge list requires i > j >= 1");
        pairs.emplace_back(i - 1, j - 1);
        maxnode = std::max(maxnode, i);
    }
    if (p == 0) p = maxnode;
    if (maxnode > p)
        throw ParseError(path + ": node index exceeds declared p");
    UndirectedGraph g(std::max(p, 1));
    for (auto [i, j] : pairs) g.set_edge(i, j);
    return g;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << '\n';
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_double(m(r, c));
        out << '\n';
    }
}

namespace {

std::vector<std::vector<double>> parse_csv_rows(const std::string& path,
                                                bool allow_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        bool bad = false;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
                if (pos != cell.size()) bad = true;
                row.push_back(v);
            } catch (const std::exception&) {
                bad = true;
            }
            if (bad) break;
        }
        if (bad) {
            if (allow_header && lineno == 1 && rows.empty()) continue;
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": non-numeric cell");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");
    return rows;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

} // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    return rows_to_matrix(parse_csv_rows(path, false));
}

Eigen::MatrixXd read_data_csv(const std::string& path) {
    Eigen::MatrixXd m = rows_to_matrix(parse_csv_rows(path, true));
    if (!m.allFinite())
        throw ParseError(path + ": NaN or infinite entry in data matrix");
    return m;
}

} // namespace gstars
