#include "vismem/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vismem/binio.hpp"
#include "vismem/errors.hpp"
#include "vismem/rand.hpp"

namespace fs = std::filesystem;

namespace vismem {

namespace {

constexpr int kKernel = 5;  // odd square filter size
constexpr char kFeatureMagic[4] = {'V', 'F', 'T', '1'};

// Skips PNM whitespace and '#' comments, then parses one unsigned integer.
int pnm_int(std::istream& is, const std::string& path) {
    int ch;
    while ((ch = is.get()) != EOF) {
        if (ch == '#') {
            while ((ch = is.get()) != EOF && ch != '\n') {}
        } else if (!std::isspace(ch)) {
            break;
        }
    }
    if (ch == EOF) throw TruncationError("truncated header in " + path);
    int v = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        v = v * 10 + (ch - '0');
        any = true;
        ch = is.get();
    }
    if (!any) throw FormatError("malformed header in " + path);
    return v;
}

}  // namespace

Image read_image(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open image: " + path);
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (!is || m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw FormatError("not a binary PGM/PPM: " + path);
    Image img;
    img.channels = (m1 == '6') ? 3 : 1;
    img.width = pnm_int(is, path);
    img.height = pnm_int(is, path);
    int maxval = pnm_int(is, path);
    if (img.width < 1 || img.height < 1)
        throw FormatError("bad image dims in " + path);
    if (maxval != 255)
        throw FormatError("only maxval 255 supported: " + path);
    // pnm_int consumed the single whitespace byte after maxval
    std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
    img.pixels.resize(count);
    if (!is.read(reinterpret_cast<char*>(img.pixels.data()), count))
        throw TruncationError("truncated pixel data in " + path);
    return img;
}

void write_pgm(const std::string& path, const std::vector<float>& values, int height,
               int width) {
    if (static_cast<std::size_t>(height) * width != values.size())
        throw DimensionError("pgm size mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "P5\n" << width << " " << height << "\n255\n";
    std::vector<std::uint8_t> row(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        float v = std::clamp(values[i], 0.0f, 1.0f);
        row[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    os.write(reinterpret_cast<const char*>(row.data()), row.size());
    if (!os) throw IoError("failed writing " + path);
}

FilterBankEncoder::FilterBankEncoder(const EncoderSpec& spec) : spec_(spec) {
    if (spec.c < 1 || spec.h < 1 || spec.w < 1)
        throw DimensionError("encoder output dims must be >= 1");
    if (spec.resize_w < kKernel || spec.resize_h < kKernel)
        throw DimensionError("resize target below kernel size");
    if (spec.h > spec.resize_h || spec.w > spec.resize_w)
        throw DimensionError("pooled dims exceed resize target");
    filters_.resize(static_cast<std::size_t>(spec.c) * 3 * kKernel * kKernel);
    double bound = std::sqrt(6.0 / (3.0 * kKernel * kKernel));
    Rng rng(spec.seed);
    for (float& v : filters_) v = static_cast<float>(rng.uniform(-bound, bound));
}

FeatureCube FilterBankEncoder::encode(const Image& img) const {
    if (img.width < 1 || img.height < 1 || img.pixels.empty())
        throw DimensionError("empty image");
    if (img.channels != 1 && img.channels != 3)
        throw FormatError("unsupported channel count");

    const int H = spec_.resize_h, W = spec_.resize_w;

    // bilinear resize, half-pixel centers; gray replicates to 3 channels
    std::vector<float> resized(static_cast<std::size_t>(3) * H * W);
    double sx = static_cast<double>(img.width) / W;
    double sy = static_cast<double>(img.height) / H;
    for (int i = 0; i < H; ++i) {
        double fy = (i + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double dy = fy - y0;
        int ya = std::clamp(y0, 0, img.height - 1);
        int yb = std::clamp(y0 + 1, 0, img.height - 1);
        for (int j = 0; j < W; ++j) {
            double fx = (j + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double dx = fx - x0;
            int xa = std::clamp(x0, 0, img.width - 1);
            int xb = std::clamp(x0 + 1, 0, img.width - 1);
            for (int ch = 0; ch < 3; ++ch) {
                int sc = (img.channels == 3) ? ch : 0;
                auto px = [&](int y, int x) -> double {
                    return img.pixels[(static_cast<std::size_t>(y) * img.width + x) *
                                          img.channels +
                                      sc];
                };
                double v = (1 - dy) * ((1 - dx) * px(ya, xa) + dx * px(ya, xb)) +
                           dy * ((1 - dx) * px(yb, xa) + dx * px(yb, xb));
                resized[(static_cast<std::size_t>(ch) * H + i) * W + j] =
                    static_cast<float>(v);
            }
        }
    }

    // per-image per-channel zero-mean unit-variance; constant channels go to 0
    for (int ch = 0; ch < 3; ++ch) {
        float* plane = resized.data() + static_cast<std::size_t>(ch) * H * W;
        std::size_t hw = static_cast<std::size_t>(H) * W;
        double mean = 0.0;
        for (std::size_t k = 0; k < hw; ++k) mean += plane[k];
        mean /= static_cast<double>(hw);
        double var = 0.0;
        for (std::size_t k = 0; k < hw; ++k) {
            double d = plane[k] - mean;
            var += d * d;
        }
        var /= static_cast<double>(hw);
        double inv = (var > 0.0) ? 1.0 / std::sqrt(var) : 0.0;
        for (std::size_t k = 0; k < hw; ++k)
            plane[k] = static_cast<float>((plane[k] - mean) * inv);
    }

    // circular-padded 3->c convolution + tanh, pooled adaptively to (h, w).
    // Conv and pool fuse: each output cell accumulates responses over its pool
    // window directly, skipping the full-resolution response map.
    FeatureCube out(spec_.c, spec_.h, spec_.w);
    const int half = kKernel / 2;
    for (int f = 0; f < spec_.c; ++f) {
        const float* filt = filters_.data() + static_cast<std::size_t>(f) * 3 * kKernel * kKernel;
        for (int oi = 0; oi < spec_.h; ++oi) {
            int r0 = static_cast<int>(static_cast<long>(oi) * H / spec_.h);
            int r1 = static_cast<int>(static_cast<long>(oi + 1) * H / spec_.h);
            for (int oj = 0; oj < spec_.w; ++oj) {
                int c0 = static_cast<int>(static_cast<long>(oj) * W / spec_.w);
                int c1 = static_cast<int>(static_cast<long>(oj + 1) * W / spec_.w);
                double acc = 0.0;
                for (int r = r0; r < r1; ++r) {
                    for (int cc = c0; cc < c1; ++cc) {
                        double resp = 0.0;
                        for (int ch = 0; ch < 3; ++ch) {
                            const float* plane =
                                resized.data() + static_cast<std::size_t>(ch) * H * W;
                            const float* fk =
                                filt + static_cast<std::size_t>(ch) * kKernel * kKernel;
                            for (int di = 0; di < kKernel; ++di) {
                                int y = (r + di - half + H) % H;
                                for (int dj = 0; dj < kKernel; ++dj) {
                                    int x = (cc + dj - half + W) % W;
                                    resp += fk[di * kKernel + dj] *
                                            plane[static_cast<std::size_t>(y) * W + x];
                                }
                            }
                        }
                        acc += std::tanh(resp);
                    }
                }
                out.at(f, oi, oj) =
                    static_cast<float>(acc / ((r1 - r0) * static_cast<double>(c1 - c0)));
            }
        }
    }
    return out;
}

void write_feature_file(const std::string& path, const FeatureCube& cube) {
    if (!all_finite(cube))
        throw FormatError("refusing to write non-finite features: " + path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    binio::put_magic(os, kFeatureMagic);
    binio::put<std::uint32_t>(os, 1u);  // version
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(cube.c()));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(cube.h()));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(cube.w()));
    binio::put_f32_array(os, cube.data(), cube.size());
    if (!os) throw IoError("failed writing " + path);
}

FeatureCube read_feature_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open feature file: " + path);
    binio::check_magic(is, kFeatureMagic, "feature file " + path);
    auto version = binio::get<std::uint32_t>(is, "feature version");
    if (version != 1) throw FormatError("unsupported feature version in " + path);
    int c = static_cast<int>(binio::get<std::uint32_t>(is, "feature c"));
    int h = static_cast<int>(binio::get<std::uint32_t>(is, "feature h"));
    int w = static_cast<int>(binio::get<std::uint32_t>(is, "feature w"));
    if (c < 1 || h < 1 || w < 1) throw DimensionError("feature file declares invalid dims");
    FeatureCube cube(c, h, w);
    binio::get_f32_array(is, cube.data(), cube.size(), "feature payload");
    if (!all_finite(cube)) throw FormatError("non-finite feature values in " + path);
    return cube;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open manifest: " + path);
    std::vector<ManifestEntry> entries;
    std::string line;
    long lineno = 0;
    long last_index = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ManifestEntry e;
        std::string idx;
        if (!std::getline(ss, idx, '\t') || !std::getline(ss, e.path, '\t'))
            throw FormatError("malformed manifest line " + std::to_string(lineno) +
                              " in " + path);
        std::getline(ss, e.timestamp, '\t');  // optional third field
        try {
            e.index = std::stol(idx);
        } catch (...) {
            throw FormatError("bad index on manifest line " + std::to_string(lineno));
        }
        if (e.index <= last_index)
            throw FormatError("manifest indices not strictly increasing at line " +
                              std::to_string(lineno));
        last_index = e.index;
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    for (const auto& e : entries) {
        os << e.index << '\t' << e.path;
        if (!e.timestamp.empty()) os << '\t' << e.timestamp;
        os << '\n';
    }
    if (!os) throw IoError("failed writing " + path);
}

std::vector<FeatureCube> load_features(const std::string& manifest_path) {
    auto entries = read_manifest(manifest_path);
    fs::path base = fs::path(manifest_path).parent_path();
    std::vector<FeatureCube> cubes;
    cubes.reserve(entries.size());
    for (const auto& e : entries) {
        fs::path p = fs::path(e.path).is_absolute() ? fs::path(e.path) : base / e.path;
        FeatureCube cube = read_feature_file(p.string());
        if (!cubes.empty() && !cube.same_shape(cubes.front()))
            throw FormatError("feature dims mismatch at manifest entry " +
                              std::to_string(e.index) + " (" + e.path + ")");
        cubes.push_back(std::move(cube));
    }
    return cubes;
}

std::string write_features(const std::vector<FeatureCube>& cubes, const std::string& dir) {
    fs::create_directories(dir);
    std::vector<ManifestEntry> entries;
    entries.reserve(cubes.size());
    char name[32];
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        std::snprintf(name, sizeof(name), "frame_%06zu.vft", i);
        write_feature_file((fs::path(dir) / name).string(), cubes[i]);
        entries.push_back({static_cast<long>(i), name, ""});
    }
    std::string manifest = (fs::path(dir) / "manifest.tsv").string();
    write_manifest(manifest, entries);
    return manifest;
}

}  // namespace vismem
