#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "hedgefit/dataset.hpp"
#include "hedgefit/model.hpp"

namespace testsup {

// 1-d model predicting theta[0] regardless of x. With a single target c the
// mean quadratic loss is (theta - c)^2.
inline hedgefit::ModelSpec constant_model() {
    return hedgefit::ModelSpec(
        1,
        [](const hedgefit::ParamVector& th, const std::vector<double>&) {
            return th[0];
        },
        [](const hedgefit::ParamVector&, const std::vector<double>&) {
            return std::vector<double>{1.0};
        },
        [](double pred, double y) { return (pred - y) * (pred - y); },
        [](double pred, double y) { return 2.0 * (pred - y); });
}

inline hedgefit::Dataset single_target(double c) {
    return hedgefit::Dataset({{{0.0}, c}});
}

// Scratch file that cleans up after itself.
class TempFile {
public:
    explicit TempFile(const std::string& name)
        : path_("/tmp/hedgefit_test_" + name) {}
    ~TempFile() { std::remove(path_.c_str()); }

    const std::string& path() const { return path_; }
    void write(const std::string& contents) const {
        std::ofstream out(path_);
        out << contents;
    }
    std::string read() const {
        std::ifstream in(path_);
        return std::string(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
    }

private:
    std::string path_;
};

}  // namespace testsup
