#pragma once

#include <string>
#include <vector>

#include "logembed/common.hpp"

namespace logembed {

struct RocPoint {
    double fpr = 0;
    double tpr = 0;
};

struct EvalRow {
    std::string feature_set;
    size_t n_pos = 0;
    size_t n_neg = 0;
    double auc = 0;
    double tpr_at_fpr_1e3 = 0; // detection rate at FPR <= 1e-3
    double tpr_at_fpr_1e4 = 0;
    std::vector<RocPoint> roc; // starts at (0,0), monotone non-decreasing
};

// Score-sorted sweep with tied scores grouped; AUC by trapezoid rule over
// exact integer counts. labels are 0/1 and both classes must be present.
EvalRow evaluate_scores(std::string feature_set, const std::vector<double>& scores,
                        const std::vector<int>& labels);

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalReport {
    std::vector<EvalRow> rows;

    std::string render_table() const;
    std::string roc_csv() const; // feature_set,fpr,tpr
};

}  // namespace logembed
