#include "htq/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "htq/numeric.hpp"

namespace htq {

double t_quantile_975(int df) {
    boost::math::students_t dist(static_cast<double>(df));
    return boost::math::quantile(dist, 0.975);
}

BatchMeans::BatchMeans(std::int64_t recorded_slots, int batches)
    : batches_(batches), batch_len_(recorded_slots / batches) {
    if (batches < 2) throw std::invalid_argument("need at least 2 batches");
    if (batch_len_ < 1)
        throw std::invalid_argument("recorded span shorter than the batch count");
    means_.reserve(batches);
}

Estimate BatchMeans::estimate() const {
    CompSum s;
    for (double m : means_) s.add(m);
    int b = static_cast<int>(means_.size());
    Estimate e;
    e.mean = s.value() / b;
    if (b < 2) {
        e.ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    CompSum ss;
    for (double m : means_) ss.add((m - e.mean) * (m - e.mean));
    double sd = std::sqrt(ss.value() / (b - 1));
    e.ci_halfwidth = t_quantile_975(b - 1) * sd / std::sqrt(static_cast<double>(b));
    return e;
}

Estimate across_replications(const std::vector<double>& values) {
    Estimate e;
    int r = static_cast<int>(values.size());
    if (r == 0) throw std::invalid_argument("no replications");
    CompSum s;
    for (double v : values) s.add(v);
    e.mean = s.value() / r;
    if (r == 1) {
        e.ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    CompSum ss;
    for (double v : values) ss.add((v - e.mean) * (v - e.mean));
    double sd = std::sqrt(ss.value() / (r - 1));
    e.ci_halfwidth = t_quantile_975(r - 1) * sd / std::sqrt(static_cast<double>(r));
    return e;
}

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line needs >= 2 points");
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double b = sxy / sxx;
    return {my - b * mx, b};
}

}  // namespace htq
