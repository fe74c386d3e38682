#include "vismem/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vismem/errors.hpp"

namespace vismem {

void write_scores(const std::string& path, const std::vector<ScoreRecord>& records) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "# index\tinterestingness\tconfidence\ttop_cube\tshift_x\tshift_y\tms\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%ld\t%.17g\t%.17g\t%d\t%d\t%d\t%.3f\n", r.index,
                      r.interestingness, r.confidence, r.top_cube, r.shift_x, r.shift_y,
                      r.ms);
        os << buf;
    }
    if (!os) throw IoError("failed writing " + path);
}

std::vector<ScoreRecord> read_scores(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open scores: " + path);
    std::vector<ScoreRecord> out;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        ScoreRecord r;
        std::istringstream ss(line);
        if (!(ss >> r.index >> r.interestingness >> r.confidence >> r.top_cube >>
              r.shift_x >> r.shift_y >> r.ms))
            throw FormatError("malformed score line " + std::to_string(lineno) + " in " +
                              path);
        if (!out.empty() && r.index <= out.back().index)
            throw FormatError("score indices not strictly increasing at line " +
                              std::to_string(lineno));
        out.push_back(r);
    }
    return out;
}

ShortTermReport short_term_learn(VisualMemory& bank, const std::vector<FeatureCube>& corpus,
                                 int max_epochs, double acc_threshold, int patience) {
    if (corpus.empty()) throw Error("short-term corpus is empty");
    if (max_epochs < 1) throw Error("max_epochs must be >= 1");
    if (patience < 1) throw Error("patience must be >= 1");

    ShortTermReport report;
    double best = -2.0;
    int stale = 0;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        double sum = 0.0;
        for (const auto& x : corpus) {
            bank.write(x);
            ReadResult rr = bank.read(x);
            sum += reading_accuracy(rr.recalled, x);
        }
        double acc = sum / static_cast<double>(corpus.size());
        report.epoch_accuracy.push_back(acc);
        report.epochs_run = epoch + 1;
        if (acc >= acc_threshold) {
            report.stop_reason = "threshold";
            return report;
        }
        if (acc > best) {
            best = acc;
            stale = 0;
        } else if (++stale >= patience) {
            report.stop_reason = "plateau";
            return report;
        }
    }
    report.stop_reason = "max-epochs";
    return report;
}

OnlineStep online_step(VisualMemory& bank, const FeatureCube& x, long index) {
    auto t0 = std::chrono::steady_clock::now();
    OnlineStep step;
    step.read = bank.read(x);
    bank.write(x);
    auto t1 = std::chrono::steady_clock::now();

    step.record.index = index;
    step.record.confidence = step.read.confidence;
    step.record.interestingness = (1.0 - step.read.confidence) / 2.0;
    step.record.top_cube = step.read.top_cube;
    step.record.shift_x = step.read.shifts[step.read.top_cube].x;
    step.record.shift_y = step.read.shifts[step.read.top_cube].y;
    step.record.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return step;
}

std::vector<float> density_map(const FeatureCube& x, const FeatureCube& recalled,
                               int height, int width) {
    require_same_shape(x, recalled);
    if (height < 1 || width < 1) throw DimensionError("density map size must be >= 1");
    int c = x.c(), h = x.h(), w = x.w();

    // cellwise d = 1 - cos(x[:, i, j], recalled[:, i, j]); zero vectors -> 0
    std::vector<double> cell(static_cast<std::size_t>(h) * w, 0.0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double d = 0.0, na = 0.0, nb = 0.0;
            for (int ch = 0; ch < c; ++ch) {
                double a = x.at(ch, i, j);
                double b = recalled.at(ch, i, j);
                d += a * b;
                na += a * a;
                nb += b * b;
            }
            if (na > 0.0 && nb > 0.0) {
                double cs = std::clamp(d / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
                cell[static_cast<std::size_t>(i) * w + j] = 1.0 - cs;
            }
        }
    }

    // bilinear upsample, half-pixel centers
    std::vector<float> out(static_cast<std::size_t>(height) * width);
    double sy = static_cast<double>(h) / height;
    double sx = static_cast<double>(w) / width;
    for (int i = 0; i < height; ++i) {
        double fy = (i + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double dy = fy - y0;
        int ya = std::clamp(y0, 0, h - 1);
        int yb = std::clamp(y0 + 1, 0, h - 1);
        for (int j = 0; j < width; ++j) {
            double fx = (j + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double dx = fx - x0;
            int xa = std::clamp(x0, 0, w - 1);
            int xb = std::clamp(x0 + 1, 0, w - 1);
            double v = (1 - dy) * ((1 - dx) * cell[static_cast<std::size_t>(ya) * w + xa] +
                                   dx * cell[static_cast<std::size_t>(ya) * w + xb]) +
                       dy * ((1 - dx) * cell[static_cast<std::size_t>(yb) * w + xa] +
                             dx * cell[static_cast<std::size_t>(yb) * w + xb]);
            out[static_cast<std::size_t>(i) * width + j] = static_cast<float>(v);
        }
    }

    float lo = *std::min_element(out.begin(), out.end());
    float hi = *std::max_element(out.begin(), out.end());
    // a spread at the rounding noise floor carries no signal; without this
    // guard a perfect recall normalizes ulp-level residue to full range
    if (hi - lo > 1e-9f) {
        for (float& v : out) v = (v - lo) / (hi - lo);
    } else {
        std::fill(out.begin(), out.end(), 0.0f);
    }
    return out;
}

}  // namespace vismem
