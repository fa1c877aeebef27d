#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "dnls/errors.hpp"
#include "dnls/lattice.hpp"

namespace dnls {

// Column table for time-sampled diagnostics; rows stream to CSV with
// 17-significant-digit doubles so traces round-trip.
struct NormTrace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void push(std::vector<double> row) {
        if (row.size() != columns.size()) throw Error("NormTrace: row width mismatch");
        rows.push_back(std::move(row));
    }

    void to_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
        for (const auto& r : rows)
            for (std::size_t i = 0; i < r.size(); ++i)
                os << detail::fmt17(r[i]) << (i + 1 < r.size() ? ',' : '\n');
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw Error("cannot open " + path);
        to_csv(os);
    }

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw Error("NormTrace: no column " + name);
    }
};

} // namespace dnls
