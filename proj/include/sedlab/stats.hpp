#pragma once

#include <cmath>
#include <cstddef>

namespace sedlab {

// Streaming mean/variance accumulator (Welford). Used for both across-
// trajectory ensemble statistics and within-window time averages.
class Accumulator {
  public:
    void add(double v) {
        ++n_;
        const double d = v - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (v - mean_);
    }

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }

    // unbiased sample variance
    double variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double stddev() const { return std::sqrt(variance()); }

    // standard error of the mean
    double stderr_mean() const {
        return n_ > 1 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

    // standard error of the sample variance (gaussian approximation)
    double stderr_variance() const {
        return n_ > 1 ? variance() * std::sqrt(2.0 / static_cast<double>(n_ - 1))
                      : 0.0;
    }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct Estimate {
    double value = 0.0;
    double stderr = 0.0;

    bool consistent_with(double target, double n_sigma = 3.0) const {
        return std::abs(value - target) <= n_sigma * stderr;
    }
};

inline Estimate estimate_of_mean(const Accumulator& a) {
    return {a.mean(), a.stderr_mean()};
}

inline Estimate estimate_of_variance(const Accumulator& a) {
    return {a.variance(), a.stderr_variance()};
}

}  // namespace sedlab
