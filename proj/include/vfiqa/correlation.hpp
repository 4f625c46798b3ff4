#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfiqa {

// Four-parameter sigmoid mapping an objective score x onto the subjective
// scale: beta1/beta2 are the asymptotes, beta3 the midpoint on the metric
// axis and |beta4| the slope scale.
struct LogisticParams {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double beta4 = 1.0;
};

inline double logistic(double x, const LogisticParams& p) {
    if (p.beta4 == 0.0) throw std::invalid_argument("logistic: beta4 must be nonzero");
    return p.beta2 + (p.beta1 - p.beta2) / (1.0 + std::exp(-(x - p.beta3) / std::abs(p.beta4)));
}

namespace detail {

using Theta = std::array<double, 4>;

inline double logistic_raw(double x, const Theta& t) {
    double scale = std::abs(t[3]);
    if (scale < 1e-12) scale = 1e-12;
    return t[1] + (t[0] - t[1]) / (1.0 + std::exp(-(x - t[2]) / scale));
}

inline double fit_sse(const std::vector<double>& x, const std::vector<double>& y, const Theta& t) {
    double sse = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = logistic_raw(x[i], t) - y[i];
        sse += r * r;
    }
    return sse;
}

inline Theta fit_gradient(const std::vector<double>& x, const std::vector<double>& y,
                          const Theta& t) {
    Theta g{};
    for (int j = 0; j < 4; ++j) {
        double h = 1e-6 * std::max(1.0, std::abs(t[j]));
        Theta tp = t, tm = t;
        tp[j] += h;
        tm[j] -= h;
        g[j] = (fit_sse(x, y, tp) - fit_sse(x, y, tm)) / (2.0 * h);
    }
    return g;
}

inline double dot(const Theta& a, const Theta& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

}  // namespace detail

// Least-squares fit of the four-parameter logistic by BFGS with numerical
// gradients and a backtracking line search. Start point: beta1 = max(y),
// beta2 = min(y), beta3 = median(x), beta4 = std(x)/4. Only steps that lower
// the squared error are taken, so the result is never worse than the start.
// Stops when the improvement drops below 1e-10 or after 500 iterations.
inline LogisticParams fit_logistic(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_logistic: input lengths differ, " +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (x.size() < 5)
        throw std::invalid_argument("fit_logistic: need at least 5 samples, got " +
                                    std::to_string(x.size()));
    for (size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw std::invalid_argument("fit_logistic: non-finite sample at index " +
                                        std::to_string(i));

    const double n = static_cast<double>(x.size());
    const double x_mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double x_var = 0.0;
    for (double xi : x) x_var += (xi - x_mean) * (xi - x_mean);
    x_var /= n;
    if (x_var == 0.0) throw std::invalid_argument("fit_logistic: scores are all identical");

    std::vector<double> xs = x;
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    const double x_median = xs[xs.size() / 2];

    detail::Theta theta{*std::max_element(y.begin(), y.end()),
                        *std::min_element(y.begin(), y.end()), x_median, std::sqrt(x_var) / 4.0};

    double sse = detail::fit_sse(x, y, theta);
    detail::Theta grad = detail::fit_gradient(x, y, theta);

    // Inverse-Hessian approximation, reset to identity whenever the model
    // stops producing descent directions.
    std::array<std::array<double, 4>, 4> hinv{};
    auto reset_hinv = [&] {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) hinv[i][j] = (i == j) ? 1.0 : 0.0;
    };
    reset_hinv();

    for (int iter = 0; iter < 500; ++iter) {
        detail::Theta dir{};
        for (int i = 0; i < 4; ++i) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) s += hinv[i][j] * grad[j];
            dir[i] = -s;
        }
        double slope = detail::dot(grad, dir);
        if (slope >= 0.0) {
            reset_hinv();
            for (int i = 0; i < 4; ++i) dir[i] = -grad[i];
            slope = detail::dot(grad, dir);
            if (slope >= 0.0) break;  // zero gradient
        }

        double step = 1.0;
        detail::Theta next = theta;
        double next_sse = sse;
        bool accepted = false;
        for (int ls = 0; ls < 48; ++ls) {
            detail::Theta cand;
            for (int i = 0; i < 4; ++i) cand[i] = theta[i] + step * dir[i];
            double cand_sse = detail::fit_sse(x, y, cand);
            if (cand_sse <= sse + 1e-4 * step * slope) {
                next = cand;
                next_sse = cand_sse;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        detail::Theta next_grad = detail::fit_gradient(x, y, next);
        detail::Theta s_vec, y_vec;
        for (int i = 0; i < 4; ++i) {
            s_vec[i] = next[i] - theta[i];
            y_vec[i] = next_grad[i] - grad[i];
        }
        const double sy = detail::dot(s_vec, y_vec);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            std::array<std::array<double, 4>, 4> updated{};
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < 4; ++k) {
                        double left = (i == k ? 1.0 : 0.0) - rho * s_vec[i] * y_vec[k];
                        for (int l = 0; l < 4; ++l) {
                            double right = (l == j ? 1.0 : 0.0) - rho * y_vec[l] * s_vec[j];
                            acc += left * hinv[k][l] * right;
                        }
                    }
                    updated[i][j] = acc + rho * s_vec[i] * s_vec[j];
                }
            }
            hinv = updated;
        } else {
            reset_hinv();
        }

        const double improvement = sse - next_sse;
        theta = next;
        sse = next_sse;
        grad = next_grad;
        if (improvement < 1e-10) break;
    }

    LogisticParams p;
    p.beta1 = theta[0];
    p.beta2 = theta[1];
    p.beta3 = theta[2];
    p.beta4 = std::abs(theta[3]) < 1e-12 ? 1e-12 : theta[3];
    return p;
}

namespace detail {

inline void require_pair_lengths(const std::vector<double>& x, const std::vector<double>& y,
                                 const char* op, size_t min_n) {
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(op) + ": input lengths differ, " +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (x.size() < min_n)
        throw std::invalid_argument(std::string(op) + ": need at least " + std::to_string(min_n) +
                                    " samples, got " + std::to_string(x.size()));
}

// Fractional (average) ranks, 1-based; ties share the mean of their ranks.
inline std::vector<double> fractional_ranks(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

// Pearson linear correlation coefficient.
inline double plcc(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair_lengths(x, y, "plcc", 2);
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("plcc: zero variance in an input");
    return sxy / std::sqrt(sxx * syy);
}

// Spearman rank correlation: Pearson correlation of fractional ranks.
inline double srcc(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair_lengths(x, y, "srcc", 2);
    return plcc(detail::fractional_ranks(x), detail::fractional_ranks(y));
}

// Kendall tau-b by direct pair counting, with the tie correction in the
// denominator.
inline double krcc(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair_lengths(x, y, "krcc", 2);
    const size_t n = x.size();
    int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, ties_xy = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0)
                ++ties_xy;
            else if (dx == 0.0)
                ++ties_x;
            else if (dy == 0.0)
                ++ties_y;
            else if ((dx > 0.0) == (dy > 0.0))
                ++concordant;
            else
                ++discordant;
        }
    }
    const int64_t n0 = static_cast<int64_t>(n) * (static_cast<int64_t>(n) - 1) / 2;
    const int64_t n1 = ties_x + ties_xy;
    const int64_t n2 = ties_y + ties_xy;
    if (n0 == n1 || n0 == n2)
        throw std::invalid_argument("krcc: zero variance in an input");
    return static_cast<double>(concordant - discordant) /
           std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

inline double rmse(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair_lengths(x, y, "rmse", 1);
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(x.size()));
}

struct EvalReport {
    double plcc = 0.0;
    double srcc = 0.0;
    double krcc = 0.0;
    double rmse = 0.0;
    LogisticParams params{};
    size_t n = 0;
};

// Full evaluation of one metric against subjective scores: logistic fit,
// then PLCC/RMSE on the fitted predictions and SRCC/KRCC on the raw scores
// (rank statistics are invariant under the monotone map).
inline EvalReport evaluate_metric(const std::vector<double>& scores,
                                  const std::vector<double>& dmos) {
    EvalReport report;
    report.params = fit_logistic(scores, dmos);
    std::vector<double> predicted(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) predicted[i] = logistic(scores[i], report.params);
    report.plcc = plcc(predicted, dmos);
    report.srcc = srcc(scores, dmos);
    report.krcc = krcc(scores, dmos);
    report.rmse = rmse(predicted, dmos);
    report.n = scores.size();
    return report;
}

}  // namespace vfiqa
