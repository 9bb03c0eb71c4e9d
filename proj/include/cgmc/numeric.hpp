#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace cgmc {

/// Counts kernel-table lookups made while evaluating an energy.
struct OpCounter {
    std::uint64_t table_reads = 0;
    void add(std::uint64_t n = 1) { table_reads += n; }
};

inline void count(OpCounter* c, std::uint64_t n = 1) {
    if (c) c->add(n);
}

/// Pairwise (tree) summation of f(0..n-1); leaves of 256 terms are summed directly.
template <class F>
double pairwise_sum(std::size_t begin, std::size_t end, F&& f) {
    if (end - begin <= 256) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += f(i);
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(begin, mid, f) + pairwise_sum(mid, end, f);
}

/// log(sum(exp(x))) with max shifting; returns -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> x) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

/// Streaming log-sum-exp accumulator; merge() is associative up to rounding.
class LogSumExp {
public:
    void add(double v) {
        if (v == -std::numeric_limits<double>::infinity()) return;
        if (v > max_) {
            sum_ = sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        } else {
            sum_ += std::exp(v - max_);
        }
    }
    void merge(const LogSumExp& o) {
        if (o.sum_ == 0.0) return;
        if (sum_ == 0.0) {
            *this = o;
            return;
        }
        if (o.max_ > max_) {
            sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
            max_ = o.max_;
        } else {
            sum_ += o.sum_ * std::exp(o.max_ - max_);
        }
    }
    double value() const {
        return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

/// Natural log of the binomial coefficient C(n, k).
inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Least-squares fit y = a + b x; returns slope, intercept and the slope's standard error.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            rss += r * r;
        }
        f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    }
    return f;
}

}  // namespace cgmc
