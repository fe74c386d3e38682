// Command-line surface: encode, short-term, online, eval, ablate, bench.
// Exit codes: 0 success, 2 config error, 4 metric error, 3 other I/O or
// runtime failure.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "vismem/bench.hpp"
#include "vismem/config.hpp"
#include "vismem/encoder.hpp"
#include "vismem/errors.hpp"
#include "vismem/memory.hpp"
#include "vismem/metrics.hpp"
#include "vismem/pipeline.hpp"
#include "vismem/rand.hpp"

namespace fs = std::filesystem;
using namespace vismem;

namespace {

struct Options {
    std::string config_path;
    std::string input, output, memory_in, memory_out, density_out, labels;
    std::string dump_config_path;
    std::optional<std::uint64_t> seed;
    std::vector<double> deltas;
    std::optional<int> stride;
    std::optional<int> category_threshold;
    bool pessimistic_ties = false;
    bool skip_bad = false;
    std::optional<int> epochs;
    std::optional<double> acc_threshold;
    std::optional<int> patience;
    // bench
    std::vector<int> bench_dims{16, 32};
    std::optional<int> bench_n, bench_c;
    int bench_rounds = 8, bench_reads = 5;
    // ablate
    std::string suite;
};

RunConfig effective_config(Options& opt, const std::string& command) {
    RunConfig cfg;
    if (!opt.config_path.empty()) cfg = parse_config_file(opt.config_path);
    if (opt.seed) {
        if (command == "encode") cfg.encoder.seed = *opt.seed;
        else cfg.memory.seed = *opt.seed;
    }
    if (!opt.deltas.empty()) cfg.eval.deltas = opt.deltas;
    if (opt.stride) cfg.eval.stride = *opt.stride;
    if (opt.category_threshold) cfg.eval.category_threshold = *opt.category_threshold;
    if (opt.pessimistic_ties) cfg.eval.pessimistic_ties = true;
    if (opt.epochs) cfg.short_term.max_epochs = *opt.epochs;
    if (opt.acc_threshold) cfg.short_term.acc_threshold = *opt.acc_threshold;
    if (opt.patience) cfg.short_term.patience = *opt.patience;
    if (!opt.input.empty()) cfg.paths.input = opt.input;
    if (!opt.output.empty()) cfg.paths.output = opt.output;
    if (!opt.memory_in.empty()) cfg.paths.memory_in = opt.memory_in;
    if (!opt.memory_out.empty()) cfg.paths.memory_out = opt.memory_out;
    if (!opt.density_out.empty()) cfg.paths.density_out = opt.density_out;
    if (!opt.labels.empty()) cfg.paths.labels = opt.labels;
    validate_config(cfg);
    if (!opt.dump_config_path.empty()) {
        std::ofstream os(opt.dump_config_path);
        if (!os) throw IoError("cannot write config dump: " + opt.dump_config_path);
        os << dump_config(cfg);
    }
    return cfg;
}

std::string require_path(const std::string& value, const char* what) {
    if (value.empty()) throw ConfigError(std::string("missing required path: ") + what);
    return value;
}

int thread_budget(std::size_t jobs) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned cap = hw;
    if (const char* env = std::getenv("VISMEM_THREADS")) {
        try {
            long v = std::stol(env);
            if (v < 1) throw std::invalid_argument(env);
            cap = static_cast<unsigned>(v);
        } catch (...) {
            throw ConfigError("VISMEM_THREADS must be a positive integer");
        }
    }
    return static_cast<int>(std::min<std::size_t>(std::min(hw, cap), jobs));
}

std::vector<std::string> collect_images(const std::string& input) {
    std::vector<std::string> paths;
    if (fs::is_directory(input)) {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(input)) {
            if (!e.is_regular_file()) continue;
            std::string ext = e.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
            if (ext == ".ppm" || ext == ".pgm") names.push_back(e.path().filename().string());
        }
        std::sort(names.begin(), names.end());  // lexicographic frame order
        for (const auto& n : names) paths.push_back((fs::path(input) / n).string());
    } else {
        std::ifstream is(input);
        if (!is) throw IoError("cannot open image list: " + input);
        fs::path base = fs::path(input).parent_path();
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            fs::path p(line);
            paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
        }
    }
    return paths;
}

int cmd_encode(Options& opt) {
    RunConfig cfg = effective_config(opt, "encode");
    if (cfg.encoder.kind != EncoderSpec::Kind::baseline_filter_bank)
        throw ConfigError("encode requires encoder.kind = baseline-filter-bank");
    std::string input = require_path(cfg.paths.input, "--input");
    std::string outdir = require_path(cfg.paths.output, "--output");

    std::vector<std::string> paths = collect_images(input);
    fs::create_directories(outdir);
    FilterBankEncoder encoder(cfg.encoder);

    std::vector<FeatureCube> cubes(paths.size());
    std::vector<std::string> failures(paths.size());
    int nthreads = paths.empty() ? 1 : thread_budget(paths.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < paths.size();) {
            try {
                cubes[i] = encoder.encode(read_image(paths[i]));
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<ManifestEntry> entries;
    long encoded = 0, skipped = 0;
    char name[32];
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!failures[i].empty()) {
            if (!opt.skip_bad) throw IoError("failed to encode " + paths[i] + ": " + failures[i]);
            std::cerr << "vismem: skipping " << paths[i] << ": " << failures[i] << "\n";
            ++skipped;
            continue;
        }
        std::snprintf(name, sizeof(name), "frame_%06zu.vft", i);
        write_feature_file((fs::path(outdir) / name).string(), cubes[i]);
        entries.push_back({static_cast<long>(i), name, ""});
        ++encoded;
    }
    std::string manifest = (fs::path(outdir) / "manifest.tsv").string();
    write_manifest(manifest, entries);
    std::cout << "encoded " << encoded << " frames (" << skipped << " skipped) -> "
              << manifest << "\n";
    return 0;
}

VisualMemory make_bank(const RunConfig& cfg, const std::vector<FeatureCube>& cubes) {
    if (!cfg.paths.memory_in.empty()) {
        VisualMemory bank = VisualMemory::load_file(cfg.paths.memory_in);
        if (!cubes.empty() && (bank.c() != cubes[0].c() || bank.h() != cubes[0].h() ||
                               bank.w() != cubes[0].w()))
            throw DimensionError("memory snapshot dims do not match input features");
        return bank;
    }
    if (cubes.empty()) throw Error("no input features and no memory snapshot");
    return VisualMemory(cfg.memory.n, cubes[0].c(), cubes[0].h(), cubes[0].w(),
                        cfg.memory.gamma_w, cfg.memory.gamma_r, cfg.memory.seed);
}

int cmd_short_term(Options& opt) {
    RunConfig cfg = effective_config(opt, "short-term");
    std::string input = require_path(cfg.paths.input, "--input");
    std::string memory_out = require_path(cfg.paths.memory_out, "--memory-out");

    std::vector<FeatureCube> corpus = load_features(input);
    VisualMemory bank = make_bank(cfg, corpus);
    ShortTermReport report = short_term_learn(bank, corpus, cfg.short_term.max_epochs,
                                              cfg.short_term.acc_threshold,
                                              cfg.short_term.patience);
    bank.save_file(memory_out);

    std::cout << "epochs\t" << report.epochs_run << "\n";
    std::cout << "stop_reason\t" << report.stop_reason << "\n";
    char buf[64];
    for (std::size_t i = 0; i < report.epoch_accuracy.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "epoch_accuracy\t%zu\t%.17g\n", i + 1,
                      report.epoch_accuracy[i]);
        std::cout << buf;
    }
    std::cout << "memory_out\t" << memory_out << "\n";
    return 0;
}

int cmd_online(Options& opt) {
    RunConfig cfg = effective_config(opt, "online");
    std::string input = require_path(cfg.paths.input, "--input");
    std::string output = require_path(cfg.paths.output, "--output");

    auto entries = read_manifest(input);
    std::vector<FeatureCube> cubes = load_features(input);
    VisualMemory bank = make_bank(cfg, cubes);

    if (!cfg.paths.density_out.empty()) fs::create_directories(cfg.paths.density_out);

    std::vector<ScoreRecord> records;
    records.reserve(cubes.size());
    char name[40];
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        OnlineStep step = online_step(bank, cubes[i], entries[i].index);
        records.push_back(step.record);
        if (!cfg.paths.density_out.empty()) {
            auto map = density_map(cubes[i], step.read.recalled, cfg.encoder.resize_h,
                                   cfg.encoder.resize_w);
            std::snprintf(name, sizeof(name), "density_%06ld.pgm", entries[i].index);
            write_pgm((fs::path(cfg.paths.density_out) / name).string(), map,
                      cfg.encoder.resize_h, cfg.encoder.resize_w);
        }
    }
    write_scores(output, records);
    if (!cfg.paths.memory_out.empty()) bank.save_file(cfg.paths.memory_out);
    std::cout << "scored " << records.size() << " frames -> " << output << "\n";
    return 0;
}

int cmd_eval(Options& opt) {
    RunConfig cfg = effective_config(opt, "eval");
    std::string scores_path = require_path(cfg.paths.input, "--input");
    std::string labels_path = require_path(cfg.paths.labels, "--labels");

    auto records = read_scores(scores_path);
    auto labels = read_labels(labels_path);
    std::map<long, int> count_of;
    for (const auto& l : labels) count_of[l.index] = l.count;

    LabeledSequence seq;
    for (const auto& r : records) {
        auto it = count_of.find(r.index);
        if (it == count_of.end())
            throw MetricError("no label for frame " + std::to_string(r.index));
        seq.counts.push_back(it->second);
        seq.scores.push_back(r.interestingness);
    }

    TieRank ties = cfg.eval.pessimistic_ties ? TieRank::pessimistic : TieRank::optimistic;
    MetricReport report = evaluate(seq, cfg.eval.deltas, cfg.eval.category_threshold, ties,
                                   cfg.eval.stride);
    if (!cfg.paths.output.empty()) {
        std::ofstream os(cfg.paths.output);
        if (!os) throw IoError("cannot open for writing: " + cfg.paths.output);
        write_report(os, report);
    } else {
        write_report(std::cout, report);
    }
    return 0;
}

FeatureCube gaussian_cube(Rng& rng, int c, int h, int w, double scale) {
    FeatureCube x(c, h, w);
    for (std::size_t i = 0; i < x.size(); ++i)
        x.data()[i] = static_cast<float>(rng.normal() * scale);
    return x;
}

// Two-pattern write protocol (f1 x5, f2 x5, f1 x5) recorded under a given
// write function; returns per-step reading accuracy of both patterns.
template <typename WriteFn>
void two_pattern_series(VisualMemory& bank, const FeatureCube& f1, const FeatureCube& f2,
                        WriteFn&& write, std::vector<double>& acc1,
                        std::vector<double>& acc2) {
    for (int step = 0; step < 15; ++step) {
        const FeatureCube& x = (step < 5 || step >= 10) ? f1 : f2;
        write(bank, x);
        acc1.push_back(reading_accuracy(bank.read(f1).recalled, f1));
        acc2.push_back(reading_accuracy(bank.read(f2).recalled, f2));
    }
}

int cmd_ablate(Options& opt) {
    RunConfig cfg = effective_config(opt, "ablate");
    std::ofstream file;
    if (!cfg.paths.output.empty()) {
        file.open(cfg.paths.output);
        if (!file) throw IoError("cannot open for writing: " + cfg.paths.output);
    }
    std::ostream& os = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    char buf[256];

    const int c = 8, h = 8, w = 8;
    Rng rng(cfg.memory.seed);
    FeatureCube f1 = gaussian_cube(rng, c, h, w, 3.0);
    FeatureCube f2 = gaussian_cube(rng, c, h, w, 3.0);

    if (opt.suite == "sparse-writing") {
        VisualMemory sparse(cfg.memory.n, c, h, w, cfg.memory.gamma_w, cfg.memory.gamma_r,
                            cfg.memory.seed);
        VisualMemory nonsparse = sparse;
        std::vector<double> s1, s2, n1, n2;
        two_pattern_series(sparse, f1, f2, [](VisualMemory& b, const FeatureCube& x) { b.write(x); },
                           s1, s2);
        double gamma = cfg.memory.gamma_w;
        two_pattern_series(nonsparse, f1, f2,
                           [gamma](VisualMemory& b, const FeatureCube& x) { b.write_nonsparse(x, gamma); },
                           n1, n2);
        os << "# step\tsparse_f1\tsparse_f2\tnonsparse_f1\tnonsparse_f2\n";
        for (int t = 0; t < 15; ++t) {
            std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\t%.9g\t%.9g\n", t, s1[t], s2[t],
                          n1[t], n2[t]);
            os << buf;
        }
    } else if (opt.suite == "capacity") {
        // usage balancing off in both banks so capacity is the only variable
        VisualMemory small(2, c, h, w, cfg.memory.gamma_w, cfg.memory.gamma_r,
                           cfg.memory.seed);
        VisualMemory large(100, c, h, w, cfg.memory.gamma_w, cfg.memory.gamma_r,
                           cfg.memory.seed);
        auto unbalanced = [](VisualMemory& b, const FeatureCube& x) { b.write_unbalanced(x); };
        std::vector<double> s1, s2, l1, l2;
        two_pattern_series(small, f1, f2, unbalanced, s1, s2);
        two_pattern_series(large, f1, f2, unbalanced, l1, l2);
        os << "# step\tn2_f1\tn100_f1\n";
        for (int t = 0; t < 15; ++t) {
            std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\n", t, s1[t], l1[t]);
            os << buf;
        }
    } else if (opt.suite == "usage") {
        VisualMemory disabled(2, c, h, w, cfg.memory.gamma_w, cfg.memory.gamma_r,
                              cfg.memory.seed);
        VisualMemory enabled = disabled;
        std::vector<double> d1, d2, e1, e2;
        two_pattern_series(disabled, f1, f2,
                           [](VisualMemory& b, const FeatureCube& x) { b.write_unbalanced(x); },
                           d1, d2);
        two_pattern_series(enabled, f1, f2,
                           [](VisualMemory& b, const FeatureCube& x) { b.write(x); }, e1, e2);
        os << "# step\tdisabled_f1\tenabled_f1\n";
        for (int t = 0; t < 15; ++t) {
            std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\n", t, d1[t], e1[t]);
            os << buf;
        }
    } else if (opt.suite == "loss-of-interest") {
        // A three times, then B six times, under fast and slow writing rates
        FeatureCube a = gaussian_cube(rng, c, h, w, 4.0);
        FeatureCube b = gaussian_cube(rng, c, h, w, 4.0);
        os << "# t\tpattern\tscore_fast\tscore_slow\n";
        VisualMemory fast(cfg.memory.n, c, h, w, 1.0, cfg.memory.gamma_r, cfg.memory.seed);
        VisualMemory slow(cfg.memory.n, c, h, w, 0.2, cfg.memory.gamma_r, cfg.memory.seed);
        for (int t = 0; t < 9; ++t) {
            const FeatureCube& x = (t < 3) ? a : b;
            double sf = online_step(fast, x, t).record.interestingness;
            double ss = online_step(slow, x, t).record.interestingness;
            std::snprintf(buf, sizeof(buf), "%d\t%s\t%.9g\t%.9g\n", t, (t < 3) ? "A" : "B",
                          sf, ss);
            os << buf;
        }
    } else {
        throw ConfigError("unknown ablation suite '" + opt.suite +
                          "' (sparse-writing|capacity|usage|loss-of-interest)");
    }
    if (file.is_open())
        std::cout << "ablation '" << opt.suite << "' -> " << cfg.paths.output << "\n";
    return 0;
}

int cmd_bench(Options& opt) {
    RunConfig cfg = effective_config(opt, "bench");
    int n = opt.bench_n.value_or(cfg.memory.n);
    int c = opt.bench_c.value_or(cfg.encoder.c);
    std::vector<int> dims = opt.bench_dims;
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());

    char buf[128];
    std::printf("# n\tc\th\tw\tms_per_read\n");
    std::map<int, double> ms_of;
    for (int d : dims) {
        BenchPoint p = bench_read(n, c, d, d, cfg.memory.seed, opt.bench_rounds,
                                  opt.bench_reads);
        ms_of[d] = p.ms_per_read;
        std::snprintf(buf, sizeof(buf), "%d\t%d\t%d\t%d\t%.3f\n", p.n, p.c, p.h, p.w,
                      p.ms_per_read);
        std::fputs(buf, stdout);
    }

    // log-linear contract on doubled spatial dims, measured interleaved
    int violations = 0;
    for (int d : dims) {
        if (!ms_of.count(2 * d)) continue;
        ScalingResult sr = bench_scaling(n, c, d, 2 * d, cfg.memory.seed, opt.bench_rounds,
                                         opt.bench_reads);
        bool ok = sr.ratio <= 4.6;
        std::snprintf(buf, sizeof(buf), "scaling\t%dx%d->%dx%d\tratio=%.3f\t%s\n", d, d,
                      2 * d, 2 * d, sr.ratio, ok ? "ok" : "VIOLATION");
        std::fputs(buf, stdout);
        if (!ok) ++violations;
    }
    if (violations > 0) throw MetricError("spatial scaling contract violated");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"translation-invariant visual memory: encoding, learning, scoring, evaluation"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "config file (flat key=value)");
        cmd->add_option("--seed", opt.seed, "override the seed used by this command");
        cmd->add_option("--dump-config", opt.dump_config_path,
                        "write the effective config to this path");
    };

    CLI::App* encode = app.add_subcommand("encode", "encode images to feature files");
    add_common(encode);
    encode->add_option("--input", opt.input, "image directory or list file");
    encode->add_option("--output", opt.output, "output feature directory");
    encode->add_flag("--skip-bad", opt.skip_bad, "skip undecodable images instead of aborting");

    CLI::App* short_term = app.add_subcommand("short-term", "write-then-read learning over a corpus");
    add_common(short_term);
    short_term->add_option("--input", opt.input, "feature manifest");
    short_term->add_option("--memory-in", opt.memory_in, "continue from a snapshot");
    short_term->add_option("--memory-out", opt.memory_out, "snapshot output path");
    short_term->add_option("--epochs", opt.epochs, "max epochs");
    short_term->add_option("--acc-threshold", opt.acc_threshold, "early-stop accuracy");
    short_term->add_option("--patience", opt.patience, "epochs without improvement before stop");

    CLI::App* online = app.add_subcommand("online", "read-score-write over a stream");
    add_common(online);
    online->add_option("--input", opt.input, "feature manifest");
    online->add_option("--output", opt.output, "score file output");
    online->add_option("--memory-in", opt.memory_in, "starting snapshot");
    online->add_option("--memory-out", opt.memory_out, "final snapshot output");
    online->add_option("--density-out", opt.density_out, "directory for density maps");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a score file against labels");
    add_common(eval);
    eval->add_option("--input", opt.input, "score file");
    eval->add_option("--labels", opt.labels, "labels file");
    eval->add_option("--output", opt.output, "report output (stdout when omitted)");
    eval->add_option("--delta,--deltas", opt.deltas, "rank-budget multipliers")->delimiter(',');
    eval->add_option("--stride", opt.stride, "evaluate every stride-th window length");
    eval->add_option("--category-threshold", opt.category_threshold,
                     "annotator votes needed for a positive");
    eval->add_flag("--pessimistic-ties", opt.pessimistic_ties, "rank ties below instead of above");

    CLI::App* ablate = app.add_subcommand("ablate", "run a built-in ablation suite");
    add_common(ablate);
    ablate->add_option("suite", opt.suite,
                       "sparse-writing|capacity|usage|loss-of-interest")->required();
    ablate->add_option("--output", opt.output, "TSV output path (stdout when omitted)");

    CLI::App* bench = app.add_subcommand("bench", "time the read path over a dims grid");
    add_common(bench);
    bench->add_option("--dims", opt.bench_dims, "spatial sizes (h=w) to time")->delimiter(',');
    bench->add_option("--cubes", opt.bench_n, "memory capacity");
    bench->add_option("--channels", opt.bench_c, "channel count");
    bench->add_option("--rounds", opt.bench_rounds, "measurement rounds");
    bench->add_option("--reads", opt.bench_reads, "reads per round");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (encode->parsed()) return cmd_encode(opt);
        if (short_term->parsed()) return cmd_short_term(opt);
        if (online->parsed()) return cmd_online(opt);
        if (eval->parsed()) return cmd_eval(opt);
        if (ablate->parsed()) return cmd_ablate(opt);
        if (bench->parsed()) return cmd_bench(opt);
    } catch (const ConfigError& e) {
        std::cerr << "vismem: config error: " << e.what() << "\n";
        return 2;
    } catch (const MetricError& e) {
        std::cerr << "vismem: metric error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "vismem: error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "vismem: error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
