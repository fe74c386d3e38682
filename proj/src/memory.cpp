#include "vismem/memory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "vismem/binio.hpp"
#include "vismem/correlation.hpp"
#include "vismem/errors.hpp"
#include "vismem/rand.hpp"

namespace vismem {

namespace {
constexpr char kMagic[4] = {'V', 'M', 'M', '1'};
constexpr double kAllUsed = 1.0 - 1e-6;
}  // namespace

double reading_accuracy(const FeatureCube& recalled, const FeatureCube& original) {
    return cosine_similarity(recalled, original);
}

VisualMemory::VisualMemory(int n, int c, int h, int w, double gamma_w,
                           double gamma_r, std::uint64_t seed)
    : n_(n), c_(c), h_(h), w_(w),
      gamma_w_(static_cast<float>(gamma_w)), gamma_r_(static_cast<float>(gamma_r)),
      step_(0), seed_(seed) {
    if (n < 1 || c < 1 || h < 1 || w < 1)
        throw DimensionError("memory dims must be >= 1");
    if (!(gamma_w > 0.0) || !(gamma_r > 0.0))
        throw Error("memory rates must be > 0");
    cubes_.resize(static_cast<std::size_t>(n) * cube_size());
    usage_.assign(n, 0.0f);
    double bound = std::sqrt(6.0 / static_cast<double>(cube_size()));
    Rng rng(seed);
    for (float& v : cubes_) v = static_cast<float>(rng.uniform(-bound, bound));
    refresh_norms();
}

FeatureCube VisualMemory::cube_tensor(int i) const {
    FeatureCube out(c_, h_, w_);
    std::copy_n(cube(i), cube_size(), out.data());
    return out;
}

void VisualMemory::refresh_norms() {
    norms_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        const float* m = cube(i);
        double s = 0.0;
        for (std::size_t k = 0; k < cube_size(); ++k) {
            double v = m[k];
            s += v * v;
        }
        norms_[i] = std::sqrt(s);
    }
}

std::vector<double> VisualMemory::similarity_to_cubes(const FeatureCube& x) const {
    if (x.c() != c_ || x.h() != h_ || x.w() != w_)
        throw DimensionError("input shape does not match memory");
    double nx = frobenius_norm(x);
    if (nx == 0.0) throw DegenerateInputError("write/read of zero-norm tensor");
    std::vector<double> sim(n_);
    for (int i = 0; i < n_; ++i) {
        const float* m = cube(i);
        double d = 0.0;
        for (std::size_t k = 0; k < cube_size(); ++k)
            d += static_cast<double>(x.data()[k]) * m[k];
        double s = (norms_[i] == 0.0) ? 0.0 : d / (nx * norms_[i]);
        sim[i] = std::clamp(s, -1.0, 1.0);
    }
    return sim;
}

std::vector<double> VisualMemory::writing_vector(const FeatureCube& x) const {
    std::vector<double> base = sparse_softmax(similarity_to_cubes(x), gamma_w_);

    double min_usage = 1.0;
    for (float u : usage_) min_usage = std::min(min_usage, static_cast<double>(u));
    if (min_usage >= kAllUsed) return base;  // all spaces used: plain vector

    std::vector<double> adj = base;
    for (int i = 0; i < n_; ++i) {
        double u = usage_[i];
        if (adj[i] < u) adj[i] *= (1.0 - u);
    }
    double sum = 0.0;
    for (double v : adj) sum += v;
    if (sum <= 0.0) return base;  // unreachable given the all-used check; defensive
    for (double& v : adj) v /= sum;
    return adj;
}

void VisualMemory::apply_write(const FeatureCube& x, const std::vector<double>& weights) {
    for (int i = 0; i < n_; ++i) {
        double wi = weights[i];
        float* m = cubes_.data() + static_cast<std::size_t>(i) * cube_size();
        double s = 0.0;
        for (std::size_t k = 0; k < cube_size(); ++k) {
            float old = m[k];
            float xv = x.data()[k];
            float nv = static_cast<float>((1.0 - wi) * old + wi * xv);
            // moving average is convex; pin the rounded float back into range
            float lo = std::min(old, xv), hi = std::max(old, xv);
            nv = std::clamp(nv, lo, hi);
            m[k] = nv;
            s += static_cast<double>(nv) * nv;
        }
        norms_[i] = std::sqrt(s);
        double u = (1.0 - wi) * static_cast<double>(usage_[i]) + wi;
        usage_[i] = static_cast<float>(std::clamp(u, 0.0, 1.0));
    }
    ++step_;
}

void VisualMemory::write(const FeatureCube& x) { apply_write(x, writing_vector(x)); }

void VisualMemory::write_nonsparse(const FeatureCube& x, double gamma) {
    apply_write(x, plain_softmax(similarity_to_cubes(x), gamma));
}

void VisualMemory::write_unbalanced(const FeatureCube& x) {
    apply_write(x, sparse_softmax(similarity_to_cubes(x), gamma_w_));
}

ReadResult VisualMemory::read(const FeatureCube& x) const {
    if (x.c() != c_ || x.h() != h_ || x.w() != w_)
        throw DimensionError("input shape does not match memory");
    double nx = frobenius_norm(x);
    if (nx == 0.0) throw DegenerateInputError("read of zero-norm tensor");

    ReadResult rr;
    rr.similarities.resize(n_);
    rr.shifts.resize(n_);

    BatchCorrelator corr(c_, h_, w_);
    corr.set_query(x.data(), nx);
    for (int i = 0; i < n_; ++i) {
        if (norms_[i] == 0.0) {  // degenerate cube matches nothing
            rr.similarities[i] = 0.0;
            rr.shifts[i] = {0, 0};
            continue;
        }
        MaxCorr mc = corr.run(cube(i), norms_[i]);
        rr.similarities[i] = mc.s_max;
        rr.shifts[i] = mc.shift;
    }

    rr.weights = sparse_softmax(rr.similarities, gamma_r_);
    rr.top_cube = static_cast<int>(
        std::max_element(rr.weights.begin(), rr.weights.end()) - rr.weights.begin());

    // recalled = sum_i r_i * shift(M_i, shift_i), accumulated in double
    std::vector<double> accum(cube_size(), 0.0);
    for (int i = 0; i < n_; ++i) {
        double wi = rr.weights[i];
        const float* m = cube(i);
        int sx = rr.shifts[i].x, sy = rr.shifts[i].y;
        for (int ch = 0; ch < c_; ++ch) {
            const float* src = m + static_cast<std::size_t>(ch) * h_ * w_;
            double* dst = accum.data() + static_cast<std::size_t>(ch) * h_ * w_;
            for (int r = 0; r < h_; ++r) {
                const float* row = src + static_cast<std::size_t>((r - sx + h_) % h_) * w_;
                double* orow = dst + static_cast<std::size_t>(r) * w_;
                for (int j = 0; j < sy; ++j) orow[j] += wi * row[j - sy + w_];
                for (int j = sy; j < w_; ++j) orow[j] += wi * row[j - sy];
            }
        }
    }
    rr.recalled = FeatureCube(c_, h_, w_);
    for (std::size_t k = 0; k < cube_size(); ++k)
        rr.recalled.data()[k] = static_cast<float>(accum[k]);

    // confidence: mean over channels of per-channel cosine; zero-norm channels
    // contribute 0
    double conf = 0.0;
    int hw = h_ * w_;
    for (int ch = 0; ch < c_; ++ch) {
        const float* a = rr.recalled.channel(ch);
        const float* b = x.channel(ch);
        double d = 0.0, na = 0.0, nb = 0.0;
        for (int k = 0; k < hw; ++k) {
            d += static_cast<double>(a[k]) * b[k];
            na += static_cast<double>(a[k]) * a[k];
            nb += static_cast<double>(b[k]) * b[k];
        }
        if (na > 0.0 && nb > 0.0)
            conf += std::clamp(d / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    }
    rr.confidence = conf / c_;
    return rr;
}

void VisualMemory::save(std::ostream& os) const {
    binio::put_magic(os, kMagic);
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(n_));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(c_));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(h_));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(w_));
    binio::put<float>(os, gamma_w_);
    binio::put<float>(os, gamma_r_);
    binio::put<std::uint64_t>(os, step_);
    binio::put<std::uint64_t>(os, seed_);
    binio::put_f32_array(os, cubes_.data(), cubes_.size());
    binio::put_f32_array(os, usage_.data(), usage_.size());
    if (!os) throw IoError("failed writing memory snapshot");
}

VisualMemory VisualMemory::load(std::istream& is) {
    binio::check_magic(is, kMagic, "memory snapshot");
    VisualMemory b;
    b.n_ = static_cast<int>(binio::get<std::uint32_t>(is, "snapshot n"));
    b.c_ = static_cast<int>(binio::get<std::uint32_t>(is, "snapshot c"));
    b.h_ = static_cast<int>(binio::get<std::uint32_t>(is, "snapshot h"));
    b.w_ = static_cast<int>(binio::get<std::uint32_t>(is, "snapshot w"));
    if (b.n_ < 1 || b.c_ < 1 || b.h_ < 1 || b.w_ < 1)
        throw DimensionError("snapshot declares invalid dims");
    b.gamma_w_ = binio::get<float>(is, "snapshot gamma_w");
    b.gamma_r_ = binio::get<float>(is, "snapshot gamma_r");
    b.step_ = binio::get<std::uint64_t>(is, "snapshot step");
    b.seed_ = binio::get<std::uint64_t>(is, "snapshot seed");
    b.cubes_.resize(static_cast<std::size_t>(b.n_) * b.cube_size());
    binio::get_f32_array(is, b.cubes_.data(), b.cubes_.size(), "snapshot cubes");
    b.usage_.resize(b.n_);
    binio::get_f32_array(is, b.usage_.data(), b.usage_.size(), "snapshot usage");
    b.refresh_norms();
    return b;
}

void VisualMemory::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    save(os);
}

VisualMemory VisualMemory::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    return load(is);
}

bool VisualMemory::operator==(const VisualMemory& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_ &&
           gamma_w_ == o.gamma_w_ && gamma_r_ == o.gamma_r_ && step_ == o.step_ &&
           seed_ == o.seed_ && cubes_ == o.cubes_ && usage_ == o.usage_;
}

}  // namespace vismem
