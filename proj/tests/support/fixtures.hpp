#ifndef PPKM_TESTS_FIXTURES_HPP
#define PPKM_TESTS_FIXTURES_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

inline std::string data_dir() {
#ifdef PPKM_DATA_DIR
    return PPKM_DATA_DIR;
#else
    return "data";
#endif
}

struct table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("column '" + name + "' not found");
    }

    double num(std::size_t row, const std::string& name) const {
        return std::stod(rows.at(row).at(column(name)));
    }

    const std::string& cell(std::size_t row, const std::string& name) const {
        return rows.at(row).at(column(name));
    }
};

inline table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace fixtures

#endif
