#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "vismem/errors.hpp"

namespace vismem {

struct Shift {
    int x = 0;  // row offset, reduced modulo h at use
    int y = 0;  // column offset, reduced modulo w

    friend bool operator==(const Shift&, const Shift&) = default;
};

// One frame's c*h*w feature tensor, channel-major storage.
class FeatureCube {
  public:
    FeatureCube() = default;

    FeatureCube(int c, int h, int w) : c_(c), h_(h), w_(w) {
        if (c < 1 || h < 1 || w < 1)
            throw DimensionError("feature cube dims must be >= 1");
        data_.assign(static_cast<std::size_t>(c) * h * w, 0.0f);
    }

    int c() const { return c_; }
    int h() const { return h_; }
    int w() const { return w_; }
    std::size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    float& at(int ch, int i, int j) {
        return data_[(static_cast<std::size_t>(ch) * h_ + i) * w_ + j];
    }
    float at(int ch, int i, int j) const {
        return data_[(static_cast<std::size_t>(ch) * h_ + i) * w_ + j];
    }

    const float* channel(int ch) const {
        return data_.data() + static_cast<std::size_t>(ch) * h_ * w_;
    }
    float* channel(int ch) {
        return data_.data() + static_cast<std::size_t>(ch) * h_ * w_;
    }

    bool same_shape(const FeatureCube& o) const {
        return c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
    }

    friend bool operator==(const FeatureCube&, const FeatureCube&) = default;

  private:
    int c_ = 0, h_ = 0, w_ = 0;
    std::vector<float> data_;
};

inline void require_same_shape(const FeatureCube& a, const FeatureCube& b) {
    if (!a.same_shape(b)) throw DimensionError("tensor shape mismatch");
}

inline bool all_finite(const FeatureCube& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a.data()[i])) return false;
    return true;
}

// Norms and dots accumulate in double regardless of f32 storage.
inline double frobenius_norm(const FeatureCube& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double v = a.data()[i];
        s += v * v;
    }
    return std::sqrt(s);
}

inline double dot(const FeatureCube& a, const FeatureCube& b) {
    require_same_shape(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += static_cast<double>(a.data()[i]) * b.data()[i];
    return s;
}

inline double cosine_similarity(const FeatureCube& a, const FeatureCube& b) {
    require_same_shape(a, b);
    double na = frobenius_norm(a);
    double nb = frobenius_norm(b);
    if (na == 0.0 || nb == 0.0)
        throw DegenerateInputError("cosine similarity of zero-norm tensor");
    double s = dot(a, b) / (na * nb);
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    return s;
}

// out[ch][i][j] = a[ch][(i - s.x) mod h][(j - s.y) mod w]; content moves
// down/right for positive shifts, and composing shifts adds indices.
inline FeatureCube circular_shift(const FeatureCube& a, Shift s) {
    int h = a.h(), w = a.w();
    int sx = ((s.x % h) + h) % h;
    int sy = ((s.y % w) + w) % w;
    FeatureCube out(a.c(), h, w);
    for (int ch = 0; ch < a.c(); ++ch) {
        const float* src = a.channel(ch);
        float* dst = out.channel(ch);
        for (int i = 0; i < h; ++i) {
            const float* row = src + (static_cast<std::size_t>((i - sx + h) % h)) * w;
            float* orow = dst + static_cast<std::size_t>(i) * w;
            // split at the wrap point: row[j - sy] for j >= sy, row[j - sy + w] before
            for (int j = 0; j < sy; ++j) orow[j] = row[j - sy + w];
            for (int j = sy; j < w; ++j) orow[j] = row[j - sy];
        }
    }
    return out;
}

}  // namespace vismem
