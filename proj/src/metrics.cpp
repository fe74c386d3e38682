#include "vismem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vismem/errors.hpp"

namespace vismem {

std::vector<LabelEntry> read_labels(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open labels: " + path);
    std::string line;
    if (!std::getline(is, line)) throw FormatError("labels file missing header: " + path);
    std::vector<LabelEntry> out;
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        LabelEntry e;
        std::istringstream ss(line);
        if (!(ss >> e.index >> e.count) || e.count < 0)
            throw FormatError("malformed label line " + std::to_string(lineno) + " in " +
                              path);
        out.push_back(e);
    }
    return out;
}

void write_labels(const std::string& path, const std::vector<LabelEntry>& entries) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "index\tcount\n";
    for (const auto& e : entries) os << e.index << '\t' << e.count << '\n';
    if (!os) throw IoError("failed writing " + path);
}

int rank_budget(double delta, int K) {
    double v = delta * K;
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9) return static_cast<int>(r);
    return static_cast<int>(std::ceil(v));
}

namespace {

void check_sequence(const LabeledSequence& seq, int k) {
    if (seq.counts.size() != seq.scores.size())
        throw MetricError("counts/scores length mismatch");
    if (seq.counts.empty()) throw MetricError("empty sequence");
    for (double s : seq.scores)
        if (!std::isfinite(s)) throw MetricError("non-finite score");
    bool any = false;
    for (int c : seq.counts)
        if (c >= k) any = true;
    if (!any) throw MetricError("no positive frames at category threshold");
}

// Fenwick tree over compressed score ranks; counts window membership.
class Fenwick {
  public:
    explicit Fenwick(int n) : tree_(n + 1, 0), n_(n) {}

    void add(int pos, int delta) {  // pos in [1, n]
        for (; pos <= n_; pos += pos & -pos) tree_[pos] += delta;
    }

    int prefix(int pos) const {  // sum of [1, pos]
        int s = 0;
        for (; pos > 0; pos -= pos & -pos) s += tree_[pos];
        return s;
    }

    void reset() { std::fill(tree_.begin(), tree_.end(), 0); }

  private:
    std::vector<int> tree_;
    int n_;
};

struct PrecisionTotals {
    long tp = 0, fp = 0;
};

// One pass over t for a fixed window length n, sliding the window membership
// through the Fenwick tree.
PrecisionTotals precision_pass(const LabeledSequence& seq, const std::vector<int>& rank_of,
                               int n, double delta, int k, TieRank ties, Fenwick& fen) {
    const int N = static_cast<int>(seq.scores.size());
    fen.reset();
    PrecisionTotals tot;
    int positives_in_window = 0;
    for (int t = 0; t < N; ++t) {
        fen.add(rank_of[t], 1);
        if (seq.counts[t] >= k) ++positives_in_window;
        int out = t - n;
        if (out >= 0) {
            fen.add(rank_of[out], -1);
            if (seq.counts[out] >= k) --positives_in_window;
        }
        if (seq.counts[t] < k) continue;
        int window = std::min(n, t + 1);
        int at_or_below = fen.prefix(rank_of[t]);
        int equal = at_or_below - fen.prefix(rank_of[t] - 1);
        int greater = window - at_or_below;
        int rank = (ties == TieRank::optimistic) ? 1 + greater : greater + equal;
        if (rank <= rank_budget(delta, positives_in_window))
            ++tot.tp;
        else
            ++tot.fp;
    }
    return tot;
}

std::vector<int> compress_ranks(const std::vector<double>& scores, int& distinct) {
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    distinct = static_cast<int>(sorted.size());
    std::vector<int> rank(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        rank[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(),
                                                    scores[i]) -
                                   sorted.begin()) +
                  1;
    return rank;
}

// Sorted by score descending, grouped by distinct score; yields cumulative
// (tp, fp) at each group boundary. Shared by the threshold-sweep metrics.
struct SweepPoint {
    long tp = 0, fp = 0;
};

std::vector<SweepPoint> threshold_sweep(const std::vector<int>& labels,
                                        const std::vector<double>& scores) {
    std::vector<int> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[a] > scores[b];
    });
    std::vector<SweepPoint> pts;
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]]) ++tp;
            else ++fp;
            ++j;
        }
        pts.push_back({tp, fp});
        i = j;
    }
    return pts;
}

long checked_positives(const std::vector<int>& labels, const std::vector<double>& scores,
                       bool need_negatives) {
    if (labels.size() != scores.size()) throw MetricError("labels/scores length mismatch");
    if (labels.empty()) throw MetricError("empty sequence");
    long pos = 0;
    for (int l : labels) pos += (l != 0);
    if (pos == 0) throw MetricError("no positive frames");
    if (need_negatives && pos == static_cast<long>(labels.size()))
        throw MetricError("single-class input");
    return pos;
}

}  // namespace

double online_precision(const LabeledSequence& seq, int n, double delta, int k,
                        TieRank ties) {
    check_sequence(seq, k);
    if (n < 1 || n > static_cast<int>(seq.scores.size()))
        throw MetricError("window length out of range");
    if (delta < 1.0) throw MetricError("delta must be >= 1");
    int distinct = 0;
    auto ranks = compress_ranks(seq.scores, distinct);
    Fenwick fen(distinct);
    auto tot = precision_pass(seq, ranks, n, delta, k, ties, fen);
    return static_cast<double>(tot.tp) / static_cast<double>(tot.tp + tot.fp);
}

std::vector<std::pair<double, double>> online_precision_curve(const LabeledSequence& seq,
                                                              double delta, int k,
                                                              TieRank ties, int stride) {
    check_sequence(seq, k);
    if (delta < 1.0) throw MetricError("delta must be >= 1");
    if (stride < 1) throw MetricError("stride must be >= 1");
    const int N = static_cast<int>(seq.scores.size());
    int distinct = 0;
    auto ranks = compress_ranks(seq.scores, distinct);
    Fenwick fen(distinct);
    std::vector<std::pair<double, double>> curve;
    for (int n = 1; n <= N; n += stride) {
        auto tot = precision_pass(seq, ranks, n, delta, k, ties, fen);
        curve.emplace_back(static_cast<double>(n) / N,
                           static_cast<double>(tot.tp) / static_cast<double>(tot.tp + tot.fp));
    }
    return curve;
}

double auc_op(const LabeledSequence& seq, double delta, int k, TieRank ties, int stride) {
    auto curve = online_precision_curve(seq, delta, k, ties, stride);
    double sum = 0.0;
    for (const auto& [_, s] : curve) sum += s;
    return sum / static_cast<double>(curve.size());
}

double precision_at_recall(const std::vector<int>& labels, const std::vector<double>& scores,
                           double target_recall) {
    long pos = checked_positives(labels, scores, false);
    auto pts = threshold_sweep(labels, scores);
    for (const auto& p : pts) {
        double recall = static_cast<double>(p.tp) / static_cast<double>(pos);
        if (recall >= target_recall)
            return static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
    }
    const auto& last = pts.back();  // recall < target even at threshold 0
    return static_cast<double>(last.tp) / static_cast<double>(last.tp + last.fp);
}

double auc_roc(const std::vector<int>& labels, const std::vector<double>& scores) {
    long pos = checked_positives(labels, scores, true);
    long neg = static_cast<long>(labels.size()) - pos;
    // average-rank formulation of the pairwise statistic (ties count 0.5)
    std::vector<int> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[a] < scores[b];
    });
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        long group_pos = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]]) ++group_pos;
            ++j;
        }
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        pos_rank_sum += avg_rank * group_pos;
        i = j;
    }
    return (pos_rank_sum - static_cast<double>(pos) * (pos + 1) / 2.0) /
           (static_cast<double>(pos) * neg);
}

double auc_pr(const std::vector<int>& labels, const std::vector<double>& scores) {
    long pos = checked_positives(labels, scores, true);
    auto pts = threshold_sweep(labels, scores);
    // suffix max of precision, so p_interp(r) = max precision at recall >= r
    std::vector<double> prec(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        prec[i] = static_cast<double>(pts[i].tp) / static_cast<double>(pts[i].tp + pts[i].fp);
    for (std::size_t i = pts.size(); i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);
    double area = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double recall = static_cast<double>(pts[i].tp) / static_cast<double>(pos);
        area += (recall - prev_recall) * prec[i];
        prev_recall = recall;
    }
    return area;
}

MetricReport evaluate(const LabeledSequence& seq, const std::vector<double>& deltas, int k,
                      TieRank ties, int stride) {
    check_sequence(seq, k);
    if (deltas.empty()) throw MetricError("no deltas given");

    MetricReport report;
    report.frames = static_cast<long>(seq.scores.size());
    report.category_threshold = k;
    report.ties = ties;
    report.stride = stride;

    std::vector<int> labels(seq.counts.size());
    for (std::size_t i = 0; i < seq.counts.size(); ++i) labels[i] = seq.counts[i] >= k;
    for (int l : labels) report.positives += l;

    for (double d : deltas) {
        auto curve = online_precision_curve(seq, d, k, ties, stride);
        double sum = 0.0;
        for (const auto& [_, s] : curve) sum += s;
        report.auc_op_by_delta.emplace_back(d, sum / static_cast<double>(curve.size()));
        report.curves.emplace_back(d, std::move(curve));
    }

    report.precision_at_recall50 = precision_at_recall(labels, seq.scores, 0.5);
    report.auc_roc_value = auc_roc(labels, seq.scores);
    report.auc_pr_value = auc_pr(labels, seq.scores);
    return report;
}

void write_report(std::ostream& os, const MetricReport& report) {
    char buf[128];
    os << "frames\t" << report.frames << '\n';
    os << "positives\t" << report.positives << '\n';
    os << "category_threshold\t" << report.category_threshold << '\n';
    os << "tie_rank\t" << (report.ties == TieRank::optimistic ? "optimistic" : "pessimistic")
       << '\n';
    os << "stride\t" << report.stride << '\n';
    for (const auto& [d, v] : report.auc_op_by_delta) {
        std::snprintf(buf, sizeof(buf), "auc_op\tdelta=%g\t%.17g\n", d, v);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "precision_at_recall50\t%.17g\n",
                  report.precision_at_recall50);
    os << buf;
    std::snprintf(buf, sizeof(buf), "auc_roc\t%.17g\n", report.auc_roc_value);
    os << buf;
    std::snprintf(buf, sizeof(buf), "auc_pr\t%.17g\n", report.auc_pr_value);
    os << buf;
    for (const auto& [d, curve] : report.curves) {
        for (const auto& [x, s] : curve) {
            std::snprintf(buf, sizeof(buf), "curve\tdelta=%g\t%.17g\t%.17g\n", d, x, s);
            os << buf;
        }
    }
}

}  // namespace vismem
