#include "vismem/correlation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "vismem/errors.hpp"

namespace vismem {

std::vector<double> sparse_softmax(const std::vector<double>& scores, double rate) {
    if (scores.empty()) throw DegenerateInputError("sparse_softmax of empty vector");
    if (!(rate > 0.0)) throw Error("sparse_softmax rate must be > 0");
    constexpr double kEps = 1e-6;
    std::vector<double> z(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        double s = scores[i];
        if (!std::isfinite(s)) throw DegenerateInputError("non-finite score");
        s = std::clamp(s, -1.0 + kEps, 1.0 - kEps);
        z[i] = rate * std::tan(M_PI / 2.0 * s);
    }
    double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

std::vector<double> plain_softmax(const std::vector<double>& scores, double rate) {
    if (scores.empty()) throw DegenerateInputError("softmax of empty vector");
    std::vector<double> z(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DegenerateInputError("non-finite score");
        z[i] = rate * scores[i];
    }
    double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

namespace {

// The FFTW planner is not thread-safe; plans are created once per (h, w) under
// a lock and reused forever via the new-array execute interface. FFTW_ESTIMATE
// keeps plan selection independent of runtime timing, so separate processes
// produce bit-identical transforms (required for bit-exact re-runs).
struct PlanPair {
    fftw_plan fwd = nullptr;  // r2c, h x w
    fftw_plan inv = nullptr;  // c2r, h x w
};

PlanPair plans_for(int h, int w) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({h, w});
    if (it != cache.end()) return it->second;

    int spec = h * (w / 2 + 1);
    double* r = static_cast<double*>(fftw_malloc(sizeof(double) * h * w));
    fftw_complex* s = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spec));
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_2d(h, w, r, s, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_c2r_2d(h, w, s, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(s);
    cache[{h, w}] = p;
    return p;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using fftw_buf = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
fftw_buf<T> make_buf(std::size_t count) {
    return fftw_buf<T>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

}  // namespace

struct BatchCorrelator::Impl {
    int c, h, w, hw, spec;
    PlanPair plans;
    fftw_buf<double> rbuf;       // h*w real scratch
    fftw_buf<fftw_complex> tmp;  // spec, per-channel spectrum scratch
    fftw_buf<fftw_complex> acc;  // spec, channel-summed conjugate product
    fftw_buf<fftw_complex> xspec;  // c*spec, query spectra
    double x_norm = 0.0;
    bool query_set = false;

    Impl(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), hw(h_ * w_), spec(h_ * (w_ / 2 + 1)),
          plans(plans_for(h_, w_)),
          rbuf(make_buf<double>(hw)),
          tmp(make_buf<fftw_complex>(spec)),
          acc(make_buf<fftw_complex>(spec)),
          xspec(make_buf<fftw_complex>(static_cast<std::size_t>(c_) * spec)) {}
};

BatchCorrelator::BatchCorrelator(int c, int h, int w) {
    if (c < 1 || h < 1 || w < 1) throw DimensionError("correlator dims must be >= 1");
    impl_ = std::make_unique<Impl>(c, h, w);
}

BatchCorrelator::~BatchCorrelator() = default;

void BatchCorrelator::set_query(const float* x, double x_norm) {
    Impl& im = *impl_;
    if (x_norm == 0.0) throw DegenerateInputError("max correlation of zero-norm query");
    for (int ch = 0; ch < im.c; ++ch) {
        const float* src = x + static_cast<std::size_t>(ch) * im.hw;
        for (int i = 0; i < im.hw; ++i) im.rbuf[i] = src[i];
        fftw_execute_dft_r2c(im.plans.fwd, im.rbuf.get(),
                             im.xspec.get() + static_cast<std::size_t>(ch) * im.spec);
    }
    im.x_norm = x_norm;
    im.query_set = true;
}

MaxCorr BatchCorrelator::run(const float* cube, double cube_norm) const {
    Impl& im = *impl_;
    if (!im.query_set) throw Error("correlator query not set");
    if (cube_norm == 0.0) throw DegenerateInputError("max correlation of zero-norm cube");

    for (int k = 0; k < im.spec; ++k) im.acc[k][0] = im.acc[k][1] = 0.0;
    for (int ch = 0; ch < im.c; ++ch) {
        const float* src = cube + static_cast<std::size_t>(ch) * im.hw;
        for (int i = 0; i < im.hw; ++i) im.rbuf[i] = src[i];
        fftw_execute_dft_r2c(im.plans.fwd, im.rbuf.get(), im.tmp.get());
        const fftw_complex* xs = im.xspec.get() + static_cast<std::size_t>(ch) * im.spec;
        for (int k = 0; k < im.spec; ++k) {
            // X * conj(M): correlation map over shifts of m
            im.acc[k][0] += xs[k][0] * im.tmp[k][0] + xs[k][1] * im.tmp[k][1];
            im.acc[k][1] += xs[k][1] * im.tmp[k][0] - xs[k][0] * im.tmp[k][1];
        }
    }
    // c2r may destroy its input; acc is rebuilt per cube anyway
    fftw_execute_dft_c2r(im.plans.inv, im.acc.get(), im.rbuf.get());

    double best = im.rbuf[0];
    int arg = 0;
    for (int k = 1; k < im.hw; ++k) {
        if (im.rbuf[k] > best) {  // strict: ties keep the lowest index
            best = im.rbuf[k];
            arg = k;
        }
    }
    // FFTW transforms are unnormalized; the round trip scales by h*w
    double s = best / (static_cast<double>(im.hw) * im.x_norm * cube_norm);
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    return {s, Shift{arg / im.w, arg % im.w}};
}

MaxCorr max_corr_similarity(const FeatureCube& x, const FeatureCube& m) {
    require_same_shape(x, m);
    double nx = frobenius_norm(x);
    double nm = frobenius_norm(m);
    if (nx == 0.0 || nm == 0.0)
        throw DegenerateInputError("max correlation of zero-norm tensor");
    BatchCorrelator corr(x.c(), x.h(), x.w());
    corr.set_query(x.data(), nx);
    return corr.run(m.data(), nm);
}

MaxCorr brute_force_max_corr(const FeatureCube& x, const FeatureCube& m) {
    require_same_shape(x, m);
    double nx = frobenius_norm(x);
    double nm = frobenius_norm(m);
    if (nx == 0.0 || nm == 0.0)
        throw DegenerateInputError("max correlation of zero-norm tensor");
    MaxCorr best{-2.0, {0, 0}};
    for (int sx = 0; sx < x.h(); ++sx) {
        for (int sy = 0; sy < x.w(); ++sy) {
            FeatureCube shifted = circular_shift(m, {sx, sy});
            double s = dot(x, shifted) / (nx * nm);
            if (s > best.s_max) {
                best.s_max = s;
                best.shift = {sx, sy};
            }
        }
    }
    best.s_max = std::clamp(best.s_max, -1.0, 1.0);
    return best;
}

}  // namespace vismem
