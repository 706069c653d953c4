#pragma once

#include <cstdint>
#include <vector>

namespace htq {

struct Estimate {
    double mean = 0.0;
    double ci_halfwidth = 0.0;  // 95% half-width; NaN when not estimable

    bool operator==(const Estimate&) const = default;
};

/// 97.5% Student-t quantile for the given degrees of freedom.
double t_quantile_975(int df);

/// Non-overlapping batch means over a fixed recorded span. The batch length
/// is fixed up front; trailing slots that do not fill the last batch are
/// dropped so the point estimate is the plain mean of the batch means.
class BatchMeans {
   public:
    BatchMeans(std::int64_t recorded_slots, int batches);

    void add(double x) {
        batch_sum_ += x;
        if (++in_batch_ == batch_len_) {
            means_.push_back(batch_sum_ / static_cast<double>(batch_len_));
            batch_sum_ = 0.0;
            in_batch_ = 0;
        }
    }

    bool full() const { return static_cast<int>(means_.size()) == batches_; }
    std::int64_t used_slots() const {
        return static_cast<std::int64_t>(batches_) * batch_len_;
    }
    Estimate estimate() const;  // 95% CI from the batch-mean spread
    const std::vector<double>& batch_means() const { return means_; }

   private:
    int batches_;
    std::int64_t batch_len_;
    std::int64_t in_batch_ = 0;
    double batch_sum_ = 0.0;
    std::vector<double> means_;
};

/// Mean and 95% CI across independent replications (t with R-1 df).
/// R = 1 yields a NaN half-width ("not available").
Estimate across_replications(const std::vector<double>& values);

/// Least-squares line y = a + b x; returns {a, b}.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

}  // namespace htq
