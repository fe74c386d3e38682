#pragma once

#include <string>
#include <vector>

#include "vismem/memory.hpp"
#include "vismem/tensor.hpp"

namespace vismem {

struct ScoreRecord {
    long index = 0;
    double interestingness = 0.0;  // (1 - confidence) / 2 exactly
    double confidence = 0.0;
    int top_cube = 0;
    int shift_x = 0, shift_y = 0;
    double ms = 0.0;  // wall time, excluded from determinism comparisons
};

// TSV, one record per line; floats as %.17g so doubles round-trip exactly.
void write_scores(const std::string& path, const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> read_scores(const std::string& path);

struct ShortTermReport {
    int epochs_run = 0;
    std::vector<double> epoch_accuracy;
    std::string stop_reason;  // threshold | plateau | max-epochs
};

// Write-then-read over the corpus each epoch; epoch accuracy is the mean
// reading accuracy. Stops at acc_threshold, after `patience` epochs without
// improving on the best accuracy, or at max_epochs.
ShortTermReport short_term_learn(VisualMemory& bank, const std::vector<FeatureCube>& corpus,
                                 int max_epochs, double acc_threshold, int patience);

struct OnlineStep {
    ScoreRecord record;
    ReadResult read;
};

// Read first, score from the read confidence, then write. Strictly sequential:
// nothing from later frames can influence earlier scores.
OnlineStep online_step(VisualMemory& bank, const FeatureCube& x, long index);

// Per-cell cosine distance between x and recalled channel vectors (zero-norm
// cells give 0), bilinearly upsampled to height*width, then min-max
// normalized; constant maps come back all zero.
std::vector<float> density_map(const FeatureCube& x, const FeatureCube& recalled,
                               int height, int width);

}  // namespace vismem
