#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vismem/tensor.hpp"

namespace vismem {

struct ReadResult {
    FeatureCube recalled;
    std::vector<double> weights;       // reading vector r, sums to 1
    std::vector<double> similarities;  // max-corr similarity per cube
    std::vector<Shift> shifts;         // argmax translation per cube
    double confidence = 0.0;           // channel-averaged cosine vs the query
    int top_cube = 0;                  // argmax of weights
};

// Global cosine similarity on flattened tensors; the recall-quality measure
// used by the ablations and the short-term stop criterion.
double reading_accuracy(const FeatureCube& recalled, const FeatureCube& original);

// n memory cubes + usage vector. Writing is a per-cube moving average steered
// by a sparse softmax over cosine similarities, with a usage-balancing
// adjustment; reading is translation-invariant via per-cube max correlation.
class VisualMemory {
  public:
    VisualMemory(int n, int c, int h, int w, double gamma_w, double gamma_r,
                 std::uint64_t seed);

    int n() const { return n_; }
    int c() const { return c_; }
    int h() const { return h_; }
    int w() const { return w_; }
    double gamma_w() const { return gamma_w_; }
    double gamma_r() const { return gamma_r_; }
    std::uint64_t step() const { return step_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<float>& usage() const { return usage_; }
    const float* cube(int i) const {
        return cubes_.data() + static_cast<std::size_t>(i) * cube_size();
    }
    std::size_t cube_size() const { return static_cast<std::size_t>(c_) * h_ * w_; }
    FeatureCube cube_tensor(int i) const;

    // Base vector softmax(gamma_w * tan(pi/2 * D)); where w_i < usage_i the
    // weight is scaled by (1 - usage_i) and the whole vector renormalized.
    // Once every usage entry is >= 1 - 1e-6 the adjustment is skipped.
    std::vector<double> writing_vector(const FeatureCube& x) const;

    void write(const FeatureCube& x);

    // Ablation path: plain softmax(gamma * D) weights, no usage-based
    // adjustment. Usage still follows its recursion and step still counts.
    void write_nonsparse(const FeatureCube& x, double gamma);

    // Ablation path: the sparse base vector applied without the
    // usage-balancing adjustment, for the enabled/disabled comparison.
    void write_unbalanced(const FeatureCube& x);

    // Does not mutate the bank; safe to call concurrently on a const bank.
    ReadResult read(const FeatureCube& x) const;

    void save(std::ostream& os) const;
    static VisualMemory load(std::istream& is);
    void save_file(const std::string& path) const;
    static VisualMemory load_file(const std::string& path);

    bool operator==(const VisualMemory& o) const;

  private:
    VisualMemory() = default;
    void refresh_norms();
    void apply_write(const FeatureCube& x, const std::vector<double>& weights);
    std::vector<double> similarity_to_cubes(const FeatureCube& x) const;

    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
    float gamma_w_ = 0.0f, gamma_r_ = 0.0f;
    std::uint64_t step_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<float> cubes_;   // n * c * h * w, cube-major
    std::vector<float> usage_;   // n, in [0, 1]
    std::vector<double> norms_;  // cached Frobenius norm per cube
};

}  // namespace vismem
