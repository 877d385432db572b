#pragma once

#include <string>
#include <vector>

// (N, alpha) samples for every region of the classification table, both closed endpoints
// included, with the expected description text.
struct TableRow {
    int N;
    double alpha;
    std::string expected;
};

inline const std::vector<TableRow>& table1_rows() {
    static const std::vector<TableRow> rows = {
        {1, 0.0, "regular"},
        {1, 0.5, "regular"},
        {1, 0.99, "regular"},
        {1, 1.01, "very singular"},
        {1, 1.5, "very singular"},
        {1, 2.0, "very singular"},
        {1, 2.01, "less singular"},
        {1, 3.0, "less singular"},
        {1, 10.0, "less singular"},
        {2, 1.0, "any (regular, less singular, very singular)"},
        {2, 0.0, "regular"},
        {2, 0.5, "regular"},
        {2, 3.0, "regular"},
        {3, 1.01, "regular"},
        {3, 2.0, "regular"},
        {3, 0.0, "less singular"},
        {3, 0.5, "less singular"},
        {3, 2.0 / 3.0, "very singular"},
        {3, 0.8, "very singular"},
        {4, 0.25, "less singular"},
        {4, 0.5, "very singular"},
        {4, 0.9, "very singular"},
        {5, 0.39, "less singular"},
        {5, 0.4, "very singular"},
        {5, 7.0, "regular"},
    };
    return rows;
}
