#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vismem/tensor.hpp"

namespace vismem {

// Interleaved 8-bit raster, channels 1 (gray) or 3 (RGB).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
};

// Binary portable pixmaps only: P6 (RGB) and P5 (gray), maxval 255.
Image read_image(const std::string& path);

// values in [0, 1] row-major, written as an 8-bit P5 graymap.
void write_pgm(const std::string& path, const std::vector<float>& values, int height,
               int width);

struct EncoderSpec {
    enum class Kind { baseline_filter_bank, external_features };
    Kind kind = Kind::baseline_filter_bank;
    int c = 64, h = 12, w = 12;
    std::uint64_t seed = 11;
    int resize_w = 192, resize_h = 192;
};

// Deterministic baseline encoder: bilinear resize, per-image per-channel
// zero-mean/unit-variance normalization, a seeded fixed bank of c 3x5x5
// filters with circular padding and tanh, then adaptive average pooling.
class FilterBankEncoder {
  public:
    explicit FilterBankEncoder(const EncoderSpec& spec);

    const EncoderSpec& spec() const { return spec_; }

    FeatureCube encode(const Image& img) const;

  private:
    EncoderSpec spec_;
    std::vector<float> filters_;  // c * 3 * k * k
};

// Feature file: magic "VFT1", u32 version, u32 c/h/w, f32 payload.
void write_feature_file(const std::string& path, const FeatureCube& cube);
FeatureCube read_feature_file(const std::string& path);

struct ManifestEntry {
    long index = 0;
    std::string path;       // relative to the manifest's directory
    std::string timestamp;  // optional, empty when absent
};

std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

// Loads every feature file named by a manifest, in manifest order; all cubes
// must agree on dims.
std::vector<FeatureCube> load_features(const std::string& manifest_path);

// Writes cubes as frame_%06d.vft plus a manifest.tsv in dir; returns the
// manifest path. Entry indices are 0..n-1.
std::string write_features(const std::vector<FeatureCube>& cubes, const std::string& dir);

}  // namespace vismem
