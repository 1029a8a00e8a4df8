#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "thief/forecast.hpp"
#include "thief/kernels.hpp"

namespace thief {

ArxModel fit_arx(const Matrix& x, std::span<const double> y) {
    if (x.cols() != kNumFeatures)
        throw ValidationError(cat("fit_arx: expected ", kNumFeatures, " columns, got ", x.cols()));
    if (x.rows() < kNumFeatures + 1)
        throw ValidationError(cat("fit_arx: needs at least ", kNumFeatures + 1,
                                  " training rows, got ", x.rows()));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (!std::isfinite(y[i]))
            throw ValidationError(cat("fit_arx: non-finite target in row ", i));
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (!std::isfinite(x(i, j)))
                throw ValidationError(cat("fit_arx: non-finite feature at (", i, ", ", j, ")"));
    }

    const LeastSquaresFit fit = qr_least_squares(x, y);
    ArxModel model;
    std::copy(fit.beta.begin(), fit.beta.end(), model.beta.begin());
    model.residual_std = fit.residual_std;
    model.condition = fit.condition;
    return model;
}

double predict_arx(const ArxModel& model, const FeatureVector& x,
                   const TransformParams& target) {
    const double z = kernels::dot(model.beta.data(), x.data(), kNumFeatures);
    return invert_transform(z, target);
}

void save_arx(const ArxModel& model, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write ", path.string()));
    std::fprintf(f, "beta");
    for (const double b : model.beta) std::fprintf(f, ",%.17g", b);
    std::fprintf(f, "\n");
    std::fclose(f);
}

ArxModel load_arx(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(cat("cannot open ", path.string()));
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(cat(path.string(), ": empty file"));
    std::istringstream ss(line);
    std::string tag;
    std::getline(ss, tag, ',');
    if (tag != "beta") throw ValidationError(cat(path.string(), ": expected 'beta' row"));
    ArxModel model;
    for (int j = 0; j < kNumFeatures; ++j) {
        std::string cell;
        if (!std::getline(ss, cell, ','))
            throw ValidationError(cat(path.string(), ": expected ", kNumFeatures, " coefficients"));
        model.beta[j] = std::stod(cell);
    }
    return model;
}

}  // namespace thief
