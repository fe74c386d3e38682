#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace vismem {

struct LabelEntry {
    long index = 0;
    int count = 0;  // annotators who marked the frame interesting
};

// Labels file: one header line, then index<TAB>count rows.
std::vector<LabelEntry> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<LabelEntry>& entries);

struct LabeledSequence {
    std::vector<int> counts;
    std::vector<double> scores;
};

enum class TieRank {
    optimistic,   // rank = 1 + count(strictly greater)
    pessimistic,  // ties rank below: rank = count(greater) + count(equal)
};

// Rank budget for the top-(delta*K) test: ceil, except values within 1e-9 of
// an integer round to it (float products like 1.1*10 must not ceil upward).
int rank_budget(double delta, int K);

// s(n): over ground-truth-positive frames t (count >= k), the window is the
// min(n, t+1) most recent frames ending at t; TP iff the frame's score ranks
// within rank_budget(delta, positives-in-window). Returns TP/(TP+FP).
double online_precision(const LabeledSequence& seq, int n, double delta, int k,
                        TieRank ties = TieRank::optimistic);

// T(delta) = mean of s(n) over the n grid {1, 1+stride, ...}; stride 1 covers
// every n in 1..N. O(N^2 log N) via a sliding Fenwick tree per n.
double auc_op(const LabeledSequence& seq, double delta, int k,
              TieRank ties = TieRank::optimistic, int stride = 1);

// The (n/N, s(n)) pairs behind auc_op, for reports and plots.
std::vector<std::pair<double, double>> online_precision_curve(
    const LabeledSequence& seq, double delta, int k, TieRank ties = TieRank::optimistic,
    int stride = 1);

// Prediction positive iff score >= theta. Reported at the highest threshold
// whose recall reaches the target.
double precision_at_recall(const std::vector<int>& labels, const std::vector<double>& scores,
                           double target_recall = 0.5);

// Pairwise comparison statistic, ties counted 0.5.
double auc_roc(const std::vector<int>& labels, const std::vector<double>& scores);

// Interpolated precision (max precision at recall >= r) integrated stepwise.
double auc_pr(const std::vector<int>& labels, const std::vector<double>& scores);

struct MetricReport {
    long frames = 0;
    long positives = 0;
    int category_threshold = 1;
    TieRank ties = TieRank::optimistic;
    int stride = 1;
    std::vector<std::pair<double, double>> auc_op_by_delta;  // (delta, T)
    double precision_at_recall50 = 0.0;
    double auc_roc_value = 0.0;
    double auc_pr_value = 0.0;
    // per delta: the s(n) curve as (n/N, s) pairs
    std::vector<std::pair<double, std::vector<std::pair<double, double>>>> curves;
};

MetricReport evaluate(const LabeledSequence& seq, const std::vector<double>& deltas, int k,
                      TieRank ties = TieRank::optimistic, int stride = 1);

void write_report(std::ostream& os, const MetricReport& report);

}  // namespace vismem
