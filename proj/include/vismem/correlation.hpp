#pragma once

#include <memory>
#include <vector>

#include "vismem/tensor.hpp"

namespace vismem {

// softmax(rate * tan(pi/2 * clamp(scores, -1+eps, 1-eps))), eps = 1e-6.
// The clamp keeps the tangent finite while preserving one-hot saturation at
// score 1; it lives here and only here, similarity results are not pre-clamped.
std::vector<double> sparse_softmax(const std::vector<double>& scores, double rate);

// Plain softmax(rate * scores), the non-sparse ablation weighting.
std::vector<double> plain_softmax(const std::vector<double>& scores, double rate);

struct MaxCorr {
    double s_max = 0.0;  // in [-1, 1]
    Shift shift;
};

// Max cosine similarity over all h*w circular shifts of m, FFT path:
// per-channel forward transforms, conjugate product accumulated over channels,
// one inverse transform, argmax. Ties break to the lowest linearized index.
MaxCorr max_corr_similarity(const FeatureCube& x, const FeatureCube& m);

// Exhaustive shift search; the oracle the FFT path must match.
MaxCorr brute_force_max_corr(const FeatureCube& x, const FeatureCube& m);

// Correlates one fixed query against many same-shape cubes while reusing the
// query spectra and FFT workspace. Not thread-safe; create one per read call.
class BatchCorrelator {
  public:
    BatchCorrelator(int c, int h, int w);
    ~BatchCorrelator();
    BatchCorrelator(const BatchCorrelator&) = delete;
    BatchCorrelator& operator=(const BatchCorrelator&) = delete;

    void set_query(const float* x, double x_norm);

    // cube points at c*h*w floats; cube_norm is its Frobenius norm.
    MaxCorr run(const float* cube, double cube_norm) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vismem
