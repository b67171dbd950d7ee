#include "logembed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace logembed {

EvalRow evaluate_scores(std::string feature_set, const std::vector<double>& scores,
                        const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorClass::DimensionMismatch, "scores/labels size mismatch");

    EvalRow row;
    row.feature_set = std::move(feature_set);
    for (int y : labels) (y ? row.n_pos : row.n_neg) += 1;
    if (row.n_pos == 0 || row.n_neg == 0)
        throw Error(ErrorClass::SingleClassCorpus,
                    "SingleClassCorpus: ROC needs both classes");

    std::vector<std::pair<double, int>> ranked(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) ranked[i] = {scores[i], labels[i]};
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    row.roc.push_back({0.0, 0.0});
    uint64_t tp = 0, fp = 0;
    uint64_t area2 = 0; // 2 * sum of trapezoids, in units of (tp * fp) counts
    size_t i = 0;
    while (i < ranked.size()) {
        // consume one group of tied scores
        size_t j = i;
        uint64_t group_tp = 0, group_fp = 0;
        while (j < ranked.size() && ranked[j].first == ranked[i].first) {
            (ranked[j].second ? group_tp : group_fp) += 1;
            ++j;
        }
        area2 += group_fp * (2 * tp + group_tp);
        tp += group_tp;
        fp += group_fp;
        row.roc.push_back({static_cast<double>(fp) / static_cast<double>(row.n_neg),
                           static_cast<double>(tp) / static_cast<double>(row.n_pos)});
        i = j;
    }
    row.auc = static_cast<double>(area2) /
              (2.0 * static_cast<double>(row.n_pos) * static_cast<double>(row.n_neg));

    auto tpr_at = [&](double fpr_cap) {
        const double fp_allowed = fpr_cap * static_cast<double>(row.n_neg) + 1e-12;
        double best = 0;
        uint64_t tp_walk = 0, fp_walk = 0;
        for (size_t g = 0; g < ranked.size();) {
            size_t h = g;
            while (h < ranked.size() && ranked[h].first == ranked[g].first) {
                (ranked[h].second ? tp_walk : fp_walk) += 1;
                ++h;
            }
            if (static_cast<double>(fp_walk) <= fp_allowed)
                best = static_cast<double>(tp_walk) / static_cast<double>(row.n_pos);
            g = h;
        }
        return best;
    };
    row.tpr_at_fpr_1e3 = tpr_at(1e-3);
    row.tpr_at_fpr_1e4 = tpr_at(1e-4);
    return row;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    return evaluate_scores("", scores, labels).auc;
}

std::string EvalReport::render_table() const {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-22s %8s %8s %10s %14s %14s\n", "feature_set", "n_pos",
                  "n_neg", "auc", "tpr@fpr<=1e-3", "tpr@fpr<=1e-4");
    out += buf;
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-22s %8zu %8zu %10.6f %14.4f %14.4f\n",
                      row.feature_set.c_str(), row.n_pos, row.n_neg, row.auc,
                      row.tpr_at_fpr_1e3, row.tpr_at_fpr_1e4);
        out += buf;
    }
    return out;
}

std::string EvalReport::roc_csv() const {
    std::string out = "feature_set,fpr,tpr\n";
    for (const auto& row : rows)
        for (const auto& p : row.roc) {
            out += row.feature_set;
            out += ',';
            out += fmt_g9(p.fpr);
            out += ',';
            out += fmt_g9(p.tpr);
            out += '\n';
        }
    return out;
}

}  // namespace logembed
