#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "thief/forecast.hpp"
#include "thief/kernels.hpp"
#include "thief/rng.hpp"

namespace thief {

namespace {

constexpr int kP = kNarxWeightCount;

// Flat parameter order: w_in (100), b_hidden (5), w_out (5), b_out.
void unpack(const std::vector<double>& w, NarxMember& m) {
    std::copy_n(w.begin(), m.w_in.size(), m.w_in.begin());
    std::copy_n(w.begin() + m.w_in.size(), kNarxHidden, m.b_hidden.begin());
    std::copy_n(w.begin() + m.w_in.size() + kNarxHidden, kNarxHidden, m.w_out.begin());
    m.b_out = w[kP - 1];
}

double forward(const std::vector<double>& w, const double* x, double* hidden) {
    const double* w_in = w.data();
    const double* b_hidden = w.data() + kNarxHidden * kNumFeatures;
    const double* w_out = b_hidden + kNarxHidden;
    const double b_out = w[kP - 1];
    double out = b_out;
    for (int j = 0; j < kNarxHidden; ++j) {
        const double a = kernels::dot(w_in + j * kNumFeatures, x, kNumFeatures) + b_hidden[j];
        hidden[j] = std::tanh(a);
        out += w_out[j] * hidden[j];
    }
    return out;
}

// Sum of squared residuals over the given rows; +inf if non-finite.
double sse_over(const Matrix& x, std::span<const double> y,
                std::span<const std::size_t> rows, const std::vector<double>& w) {
    double hidden[kNarxHidden];
    double acc = 0.0;
    for (const std::size_t i : rows) {
        const double r = forward(w, x.row(i), hidden) - y[i];
        acc += r * r;
    }
    return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
}

struct MemberFit {
    NarxMember member;
    bool finite = true;
};

MemberFit train_member(const Matrix& x, std::span<const double> y, std::uint64_t seed) {
    const std::size_t n = x.rows();
    Rng rng(seed);

    // Random validation split: first n_val entries of a partial shuffle.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(kNarxValidationShare * static_cast<double>(n))));
    for (std::size_t i = 0; i < n_val; ++i) {
        const std::size_t j = i + rng.uniform_index(n - i);
        std::swap(order[i], order[j]);
    }
    const std::vector<std::size_t> val_rows(order.begin(), order.begin() + n_val);
    const std::vector<std::size_t> train_rows(order.begin() + n_val, order.end());
    const std::size_t n_tr = train_rows.size();

    // Uniform [-0.5, 0.5] scaled by 1/sqrt(fan-in) of each layer.
    std::vector<double> w(kP);
    const double s_in = 1.0 / std::sqrt(static_cast<double>(kNumFeatures));
    const double s_out = 1.0 / std::sqrt(static_cast<double>(kNarxHidden));
    for (int i = 0; i < kNarxHidden * kNumFeatures + kNarxHidden; ++i)
        w[i] = rng.uniform(-0.5, 0.5) * s_in;
    for (int i = kNarxHidden * kNumFeatures + kNarxHidden; i < kP; ++i)
        w[i] = rng.uniform(-0.5, 0.5) * s_out;

    double best_val = sse_over(x, y, val_rows, w) / static_cast<double>(n_val);
    std::vector<double> best_w = w;
    if (!std::isfinite(best_val)) return {NarxMember{}, false};

    Matrix jac(n_tr, kP);
    std::vector<double> residual(n_tr), jtr(kP), trial(kP);
    double mu = kNarxMuInit;
    double sse = sse_over(x, y, train_rows, w);
    int strikes = 0;

    for (int iter = 0; iter < kNarxMaxIterations; ++iter) {
        if (!std::isfinite(sse)) return {NarxMember{}, false};

        // Residuals and Jacobian at the current weights.
        const double* w_in = w.data();
        const double* b_hidden = w.data() + kNarxHidden * kNumFeatures;
        const double* w_out = b_hidden + kNarxHidden;
        for (std::size_t r = 0; r < n_tr; ++r) {
            const double* xi = x.row(train_rows[r]);
            double* jrow = jac.row(r);
            double out = w[kP - 1];
            for (int j = 0; j < kNarxHidden; ++j) {
                const double a =
                    kernels::dot(w_in + j * kNumFeatures, xi, kNumFeatures) + b_hidden[j];
                const double h = std::tanh(a);
                out += w_out[j] * h;
                const double g = w_out[j] * (1.0 - h * h);
                double* jw = jrow + j * kNumFeatures;
                for (int k = 0; k < kNumFeatures; ++k) jw[k] = g * xi[k];
                jrow[kNarxHidden * kNumFeatures + j] = g;
                jrow[kNarxHidden * kNumFeatures + kNarxHidden + j] = h;
            }
            jrow[kP - 1] = 1.0;
            residual[r] = out - y[train_rows[r]];
        }

        Matrix jtj(kP, kP);
        kernels::crossprod_upper(jac.data(), n_tr, kP, jtj.data());
        for (int j = 0; j < kP; ++j)
            for (int k = j + 1; k < kP; ++k) jtj(k, j) = jtj(j, k);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        for (std::size_t r = 0; r < n_tr; ++r)
            kernels::axpy(residual[r], jac.row(r), jtr.data(), kP);

        // Damped step; grow mu until the step reduces the training SSE.
        bool accepted = false;
        while (mu <= kNarxMuMax) {
            Matrix a = jtj;
            for (int j = 0; j < kP; ++j) a(j, j) += mu;
            bool solved = true;
            std::vector<double> delta(jtr);
            try {
                Cholesky::factor(a).solve(delta);
            } catch (const NumericError&) {
                solved = false;
            }
            if (solved) {
                for (int j = 0; j < kP; ++j) trial[j] = w[j] - delta[j];
                const double sse_new = sse_over(x, y, train_rows, trial);
                if (sse_new < sse) {
                    w = trial;
                    sse = sse_new;
                    mu = std::max(mu / kNarxMuFactor, 1e-20);
                    accepted = true;
                    break;
                }
            }
            mu *= kNarxMuFactor;
        }
        if (!accepted) break;  // damping exhausted; keep best-so-far weights

        const double val = sse_over(x, y, val_rows, w) / static_cast<double>(n_val);
        if (!std::isfinite(val)) return {NarxMember{}, false};
        if (val < best_val) {
            best_val = val;
            best_w = w;
            strikes = 0;
        } else if (++strikes >= kNarxPatience) {
            break;
        }
    }

    MemberFit fit;
    unpack(best_w, fit.member);
    return fit;
}

}  // namespace

double NarxMember::raw_output(std::span<const double, kNumFeatures> x) const {
    double out = b_out;
    for (int j = 0; j < kNarxHidden; ++j) {
        const double a =
            kernels::dot(w_in.data() + j * kNumFeatures, x.data(), kNumFeatures) + b_hidden[j];
        out += w_out[j] * std::tanh(a);
    }
    return out;
}

NarxModel fit_narx(const Matrix& x, std::span<const double> y, std::uint64_t seed) {
    if (x.cols() != kNumFeatures)
        throw ValidationError(cat("fit_narx: expected ", kNumFeatures, " columns, got ", x.cols()));
    if (x.rows() < 100)
        throw ValidationError(cat("fit_narx: needs at least 100 training rows, got ", x.rows()));
    if (y.size() != x.rows()) throw ValidationError("fit_narx: X and y row counts differ");
    for (std::size_t i = 0; i < x.rows(); ++i)
        if (!std::isfinite(y[i]))
            throw ValidationError(cat("fit_narx: non-finite target in row ", i));

    NarxModel model;
    for (int m = 0; m < kNarxMembers; ++m) {
        MemberFit fit = train_member(x, y, derive_seed(seed, 0x6e617278ULL, m, 0));
        if (!fit.finite) {
            fit = train_member(x, y, derive_seed(seed, 0x6e617278ULL, m, 1));
            if (!fit.finite)
                throw NumericError(cat("fit_narx: member ", m, " produced non-finite loss twice"));
        }
        model.members[m] = fit.member;
    }
    return model;
}

double predict_narx(const NarxModel& model, const FeatureVector& x,
                    const TransformParams& target) {
    double acc = 0.0;
    for (const NarxMember& m : model.members) {
        const double raw = m.raw_output(x);
        const double clipped = std::clamp(raw, -kNarxClip, kNarxClip);
        acc += invert_transform(clipped, target);
    }
    return acc / kNarxMembers;
}

void save_narx(const NarxModel& model, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write ", path.string()));
    for (int m = 0; m < kNarxMembers; ++m) {
        const NarxMember& mem = model.members[m];
        const auto row = [&](const char* tag, const double* v, std::size_t count) {
            std::fprintf(f, "%d,%s", m, tag);
            for (std::size_t i = 0; i < count; ++i) std::fprintf(f, ",%.17g", v[i]);
            std::fprintf(f, "\n");
        };
        row("w_in", mem.w_in.data(), mem.w_in.size());
        row("b_hidden", mem.b_hidden.data(), mem.b_hidden.size());
        row("w_out", mem.w_out.data(), mem.w_out.size());
        row("b_out", &mem.b_out, 1);
    }
    std::fclose(f);
}

NarxModel load_narx(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(cat("cannot open ", path.string()));
    NarxModel model;
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const int m = std::stoi(cell);
        if (m < 0 || m >= kNarxMembers)
            throw ValidationError(cat(path.string(), ": member index ", m, " out of range"));
        std::string tag;
        std::getline(ss, tag, ',');
        double* dest = nullptr;
        std::size_t count = 0;
        NarxMember& mem = model.members[m];
        if (tag == "w_in") {
            dest = mem.w_in.data();
            count = mem.w_in.size();
        } else if (tag == "b_hidden") {
            dest = mem.b_hidden.data();
            count = mem.b_hidden.size();
        } else if (tag == "w_out") {
            dest = mem.w_out.data();
            count = mem.w_out.size();
        } else if (tag == "b_out") {
            dest = &mem.b_out;
            count = 1;
        } else {
            throw ValidationError(cat(path.string(), ": unknown row tag '", tag, "'"));
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (!std::getline(ss, cell, ','))
                throw ValidationError(cat(path.string(), ": truncated ", tag, " row"));
            dest[i] = std::stod(cell);
        }
        ++rows;
    }
    if (rows != kNarxMembers * 4)
        throw ValidationError(cat(path.string(), ": expected ", kNarxMembers * 4, " rows, got ", rows));
    return model;
}

}  // namespace thief
