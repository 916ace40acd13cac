#include "hedgefit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "hedgefit/errors.hpp"

namespace hedgefit {

Dataset::Dataset(std::vector<DataPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw DataError("dataset must contain at least one point");
    const std::size_t dim = points_.front().x.size();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].x.size() != dim) {
            throw DataError("point " + std::to_string(i) +
                            " has x-dimension " +
                            std::to_string(points_[i].x.size()) +
                            ", expected " + std::to_string(dim));
        }
    }
}

SubsampleSet::SubsampleSet(const Dataset& parent,
                           std::vector<std::vector<std::size_t>> indices,
                           SampleMode mode, std::uint64_t seed)
    : parent_(&parent), indices_(std::move(indices)), mode_(mode), seed_(seed) {
    if (indices_.empty()) throw DataError("subsample set is empty");
    const std::size_t m = indices_.front().size();
    for (const auto& sub : indices_) {
        if (sub.size() != m) throw DataError("subsamples differ in size");
        for (std::size_t idx : sub) {
            if (idx >= parent.size())
                throw DataError("subsample index out of parent range");
        }
        if (mode == SampleMode::WithoutReplacement) {
            auto sorted = sub;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw DataError("repeated parent index in without-replacement subsample");
        }
    }
}

ColumnSpec ColumnSpec::parse(const std::string& comma_separated) {
    ColumnSpec spec;
    std::stringstream ss(comma_separated);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        // trim
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        spec.columns.push_back(tok.substr(b, e - b + 1));
    }
    if (spec.columns.empty())
        throw DataError("empty column spec '" + comma_separated + "'");
    return spec;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

std::size_t resolve_column(const std::string& name,
                           const std::vector<std::string>& header) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it != header.end())
        return static_cast<std::size_t>(it - header.begin());
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
    if (ec == std::errc() && ptr == name.data() + name.size() &&
        idx < header.size())
        return idx;
    throw DataError("column '" + name + "' not found in header");
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError("non-numeric cell '" + cell + "' at row " +
                        std::to_string(row) + ", column " + std::to_string(col));
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const ColumnSpec& x_columns,
                 const ColumnSpec& y_column) {
    if (y_column.columns.size() != 1)
        throw DataError("y column spec must name exactly one column");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    const auto header = split_row(line);

    std::vector<std::size_t> x_idx;
    for (const auto& c : x_columns.columns)
        x_idx.push_back(resolve_column(c, header));
    const std::size_t y_idx = resolve_column(y_column.columns.front(), header);

    std::vector<DataPoint> points;
    std::size_t row = 1;  // header was row 0
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            ++row;
            continue;
        }
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw DataError("row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) +
                            " cells, header has " +
                            std::to_string(header.size()));
        }
        DataPoint pt;
        for (std::size_t c : x_idx)
            pt.x.push_back(parse_cell(cells[c], row, c));
        pt.y = parse_cell(cells[y_idx], row, y_idx);
        points.push_back(std::move(pt));
        ++row;
    }
    if (points.empty()) throw DataError("'" + path + "' has no data rows");
    return Dataset(std::move(points));
}

SubsampleSet bootstrap(const Dataset& parent, std::size_t k_plus_1,
                       std::size_t m, SampleMode mode, std::uint64_t seed) {
    if (k_plus_1 == 0) throw DataError("need at least one subsample");
    if (m == 0) throw DataError("subsample size must be positive");
    if (mode == SampleMode::WithoutReplacement && m > parent.size()) {
        throw DataError("without-replacement subsample size " +
                        std::to_string(m) + " exceeds dataset size " +
                        std::to_string(parent.size()));
    }

    // Bootstrap draws use their own keyed engine so they cannot collide with
    // the experts' noise streams.
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32), 0xB0075742u};
    std::mt19937_64 engine(seq);
    const std::size_t d = parent.size();

    std::vector<std::vector<std::size_t>> subsamples(k_plus_1);
    for (auto& sub : subsamples) {
        sub.reserve(m);
        if (mode == SampleMode::WithReplacement) {
            for (std::size_t i = 0; i < m; ++i)
                sub.push_back(engine() % d);
        } else {
            // partial Fisher-Yates over parent indices
            std::vector<std::size_t> pool(d);
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t j = i + engine() % (d - i);
                std::swap(pool[i], pool[j]);
                sub.push_back(pool[i]);
            }
        }
    }
    return SubsampleSet(parent, std::move(subsamples), mode, seed);
}

}  // namespace hedgefit
