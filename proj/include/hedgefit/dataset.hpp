#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hedgefit {

struct DataPoint {
    std::vector<double> x;
    double y = 0.0;
};

// Ordered collection of (x, y) observations with uniform x-dimensionality.
class Dataset {
public:
    explicit Dataset(std::vector<DataPoint> points);

    std::size_t size() const { return points_.size(); }
    std::size_t x_dim() const { return points_.front().x.size(); }
    const DataPoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<DataPoint>& points() const { return points_; }

private:
    std::vector<DataPoint> points_;
};

// Read-only window over a dataset, either the whole thing or a subsample
// addressed by parent indices.
class DataView {
public:
    explicit DataView(const Dataset& parent)
        : parent_(&parent), indices_(nullptr) {}
    DataView(const Dataset& parent, const std::vector<std::size_t>& indices)
        : parent_(&parent), indices_(&indices) {}

    std::size_t size() const {
        return indices_ ? indices_->size() : parent_->size();
    }
    const DataPoint& operator[](std::size_t i) const {
        return indices_ ? (*parent_)[(*indices_)[i]] : (*parent_)[i];
    }

private:
    const Dataset* parent_;
    const std::vector<std::size_t>* indices_;
};

enum class SampleMode { WithReplacement, WithoutReplacement };

// K+1 bootstrap subsamples of size m. Subsamples store parent indices, not
// point copies, so membership checks are exact. The last subsample is the
// validation set.
class SubsampleSet {
public:
    SubsampleSet(const Dataset& parent,
                 std::vector<std::vector<std::size_t>> indices,
                 SampleMode mode, std::uint64_t seed);

    std::size_t count() const { return indices_.size(); }  // K+1
    std::size_t subsample_size() const { return indices_.front().size(); }
    SampleMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<std::size_t>& indices(std::size_t k) const {
        return indices_.at(k);
    }
    DataView view(std::size_t k) const {
        return DataView(*parent_, indices_.at(k));
    }
    DataView validation_view() const { return view(count() - 1); }
    const Dataset& parent() const { return *parent_; }

private:
    const Dataset* parent_;
    std::vector<std::vector<std::size_t>> indices_;
    SampleMode mode_;
    std::uint64_t seed_;
};

// Column selector for load_csv: each entry is a header name or a 0-based
// numeric index.
struct ColumnSpec {
    std::vector<std::string> columns;

    static ColumnSpec parse(const std::string& comma_separated);
};

Dataset load_csv(const std::string& path, const ColumnSpec& x_columns,
                 const ColumnSpec& y_column);

SubsampleSet bootstrap(const Dataset& parent, std::size_t k_plus_1,
                       std::size_t m, SampleMode mode, std::uint64_t seed);

}  // namespace hedgefit
