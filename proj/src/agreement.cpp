#include "segrad/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segrad/stats.hpp"

namespace segrad {

double dsc(const LabelMask& a, const LabelMask& b) {
    require_same_grid(a.grid(), b.grid(), "dsc");
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        const bool ia = a[idx] != 0;
        const bool ib = b[idx] != 0;
        na += ia;
        nb += ib;
        both += ia && ib;
    }
    if (na + nb == 0) throw Error(ErrorKind::Undefined, "dsc: both masks are empty");
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

CccResult ccc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidInput, "ccc: sequences differ in length");
    if (x.size() < 2) throw Error(ErrorKind::InvalidInput, "ccc: need at least 2 pairs");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cov += dx * dy;
    }
    vx /= n;
    vy /= n;
    cov /= n;
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    // Two constant sequences carry no covariance information: flag, value 1 only for identical constants.
    if (constant(x) && constant(y)) return {x.front() == y.front() ? 1.0 : 0.0, true};
    const double denom = vx + vy + (mx - my) * (mx - my);
    return {2.0 * cov / denom, false};
}

RatingsMatrix::RatingsMatrix(std::size_t targets, std::size_t raters, std::vector<double> values)
    : n_(targets), k_(raters), values_(std::move(values)) {
    if (n_ < 2 || k_ < 2) throw Error(ErrorKind::InvalidInput, "ratings matrix needs n >= 2 targets and k >= 2 raters");
    if (values_.size() != n_ * k_) throw Error(ErrorKind::Incomplete, "ratings matrix has missing cells");
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "ratings must be finite");
}

AnovaTable two_way_anova(const RatingsMatrix& r) {
    const std::size_t n = r.targets();
    const std::size_t k = r.raters();
    std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            row_mean[i] += r(i, j);
            col_mean[j] += r(i, j);
            grand += r(i, j);
        }
    }
    for (double& m : row_mean) m /= static_cast<double>(k);
    for (double& m : col_mean) m /= static_cast<double>(n);
    grand /= static_cast<double>(n * k);

    double ss_rows = 0.0, ss_cols = 0.0, ss_err = 0.0;
    for (double m : row_mean) ss_rows += (m - grand) * (m - grand);
    ss_rows *= static_cast<double>(k);
    for (double m : col_mean) ss_cols += (m - grand) * (m - grand);
    ss_cols *= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double e = r(i, j) - row_mean[i] - col_mean[j] + grand;
            ss_err += e * e;
        }
    }

    AnovaTable t;
    t.n = n;
    t.k = k;
    const auto dn = static_cast<double>(n);
    const auto dk = static_cast<double>(k);
    t.ms_rows = ss_rows / (dn - 1.0);
    t.ms_columns = ss_cols / (dk - 1.0);
    t.ms_error = ss_err / ((dn - 1.0) * (dk - 1.0));
    t.ms_within = (ss_cols + ss_err) / (dn * (dk - 1.0));
    return t;
}

std::string to_string(IccModel model) {
    switch (model) {
        case IccModel::Icc1_1: return "ICC(1,1)";
        case IccModel::Icc2_1: return "ICC(2,1)";
        case IccModel::Icc3_1: return "ICC(3,1)";
    }
    return "ICC";
}

IccModel parse_icc_model(const std::string& s) {
    if (s == "ICC(1,1)" || s == "icc1" || s == "1,1") return IccModel::Icc1_1;
    if (s == "ICC(2,1)" || s == "icc2" || s == "2,1") return IccModel::Icc2_1;
    if (s == "ICC(3,1)" || s == "icc3" || s == "3,1") return IccModel::Icc3_1;
    throw Error(ErrorKind::Config, "unknown ICC model '" + s + "'");
}

namespace {

// Bounds for the F-ratio based forms (one-way and consistency models).
IccResult ratio_interval(double icc_value, double ms_num, double ms_den, double df1, double df2, double k,
                         double alpha) {
    IccResult r{icc_value, icc_value, icc_value, false};
    if (ms_den == 0.0) {
        r.lower = r.upper = 1.0;
        return r;
    }
    const double f = ms_num / ms_den;
    const double fl = f / f_quantile(1.0 - alpha / 2.0, df1, df2);
    const double fu = f * f_quantile(1.0 - alpha / 2.0, df2, df1);
    r.lower = (fl - 1.0) / (fl + k - 1.0);
    r.upper = (fu - 1.0) / (fu + k - 1.0);
    return r;
}

}  // namespace

IccResult icc(const RatingsMatrix& ratings, IccModel model, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw Error(ErrorKind::Domain, "confidence must lie in (0, 1)");
    const AnovaTable t = two_way_anova(ratings);
    const auto n = static_cast<double>(t.n);
    const auto k = static_cast<double>(t.k);
    const double alpha = 1.0 - confidence;

    const auto cells = ratings.values();
    const bool all_equal = std::all_of(cells.begin(), cells.end(), [&](double v) { return v == cells.front(); });
    if (all_equal || (t.ms_rows == 0.0 && t.ms_columns == 0.0 && t.ms_error == 0.0)) return {1.0, 1.0, 1.0, true};

    switch (model) {
        case IccModel::Icc1_1: {
            const double value = (t.ms_rows - t.ms_within) / (t.ms_rows + (k - 1.0) * t.ms_within);
            return ratio_interval(value, t.ms_rows, t.ms_within, n - 1.0, n * (k - 1.0), k, alpha);
        }
        case IccModel::Icc3_1: {
            if (t.ms_rows == 0.0 && t.ms_error == 0.0) return {1.0, 1.0, 1.0, true};
            const double value = (t.ms_rows - t.ms_error) / (t.ms_rows + (k - 1.0) * t.ms_error);
            return ratio_interval(value, t.ms_rows, t.ms_error, n - 1.0, (n - 1.0) * (k - 1.0), k, alpha);
        }
        case IccModel::Icc2_1: break;
    }

    const double msr = t.ms_rows, msc = t.ms_columns, mse = t.ms_error;
    const double value = (msr - mse) / (msr + (k - 1.0) * mse + k * (msc - mse) / n);
    IccResult r{value, value, value, false};
    if (mse == 0.0 && msc == 0.0) {
        r.lower = r.upper = 1.0;
        return r;
    }
    // Satterthwaite degrees of freedom for the denominator (McGraw & Wong, case 2A). The weights are
    // evaluated at max(icc, 0): a negative estimate can cancel the two terms and drive v to zero.
    const double rho = std::max(value, 0.0);
    const double a = k * rho / (n * (1.0 - rho));
    const double b = 1.0 + k * rho * (n - 1.0) / (n * (1.0 - rho));
    const double num = (a * msc + b * mse) * (a * msc + b * mse);
    const double den = (a * msc) * (a * msc) / (k - 1.0) + (b * mse) * (b * mse) / ((n - 1.0) * (k - 1.0));
    double v = num / den;
    if (!std::isfinite(v) || v < 1e-8) v = 1e-8;
    const double fl = f_quantile(1.0 - alpha / 2.0, n - 1.0, v);
    const double fu = f_quantile(1.0 - alpha / 2.0, v, n - 1.0);
    const double pooled = k * msc + (k * n - k - n) * mse;
    r.lower = n * (msr - fl * mse) / (fl * pooled + n * msr);
    r.upper = n * (fu * msr - mse) / (pooled + n * fu * msr);
    return r;
}

PairwiseIccMatrix::PairwiseIccMatrix(std::size_t k) : k_(k), cells_(k * k) {
    for (std::size_t i = 0; i < k; ++i) cells_[i * k + i] = IccResult{1.0, 1.0, 1.0, false};
}

void PairwiseIccMatrix::set(std::size_t i, std::size_t j, const IccResult& r) {
    cells_[i * k_ + j] = r;
    cells_[j * k_ + i] = r;
}

double PairwiseIccMatrix::min_off_diagonal() const noexcept {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = i + 1; j < k_; ++j) {
            const IccResult& r = (*this)(i, j);
            if (r.degenerate) continue;
            if (std::isnan(best) || r.icc < best) best = r.icc;
        }
    }
    return best;
}

std::vector<double> PairwiseIccMatrix::icc_values() const {
    std::vector<double> out(cells_.size());
    std::transform(cells_.begin(), cells_.end(), out.begin(), [](const IccResult& r) { return r.icc; });
    return out;
}

PairwiseIccMatrix pairwise_icc(const RatingsMatrix& ratings, IccModel model, double confidence) {
    const std::size_t n = ratings.targets();
    const std::size_t k = ratings.raters();
    PairwiseIccMatrix out(k);
    std::vector<double> pair(n * 2);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            for (std::size_t t = 0; t < n; ++t) {
                pair[2 * t] = ratings(t, i);
                pair[2 * t + 1] = ratings(t, j);
            }
            out.set(i, j, icc(RatingsMatrix(n, 2, pair), model, confidence));
        }
    }
    return out;
}

std::string classify(Metric metric, double value) {
    if (metric == Metric::Dsc) return value > 0.7 ? "good" : "poor";
    if (value < 0.5) return "poor";
    if (value < 0.75) return "moderate";
    if (value < 0.9) return "good";
    return "excellent";
}

}  // namespace segrad
