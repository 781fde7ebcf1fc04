#include "rdde/kernels.hpp"

#include <stdexcept>

namespace rdde::kernels {

namespace {
constexpr std::size_t kParallelRows = 256;

double dist(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        const double d = a[c] - b[c];
        acc += d * d;
    }
    return std::sqrt(acc);
}
}  // namespace

bool use_parallel(Exec e, std::size_t rows) {
    switch (e) {
        case Exec::serial: return false;
        case Exec::parallel: return true;
        case Exec::automatic:
            return rows >= kParallelRows && !omp_in_parallel() && omp_get_max_threads() > 1;
    }
    return false;
}

std::vector<double> inverse_lag_powers(std::size_t n, double h, double exponent) {
    std::vector<double> inv(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) inv[k] = std::pow(static_cast<double>(k) * h, -exponent);
    return inv;
}

double path_hoelder_serial(const double* x, std::size_t n, std::size_t dim, double h, double exponent) {
    const auto inv = inverse_lag_powers(n, h, exponent);
    return pair_sup_serial(n, inv, [&](std::size_t s, std::size_t t) { return dist(x + t * dim, x + s * dim, dim); });
}

double path_hoelder_parallel(const double* x, std::size_t n, std::size_t dim, double h, double exponent) {
    const auto inv = inverse_lag_powers(n, h, exponent);
    return pair_sup_parallel(n, inv, [&](std::size_t s, std::size_t t) { return dist(x + t * dim, x + s * dim, dim); });
}

double path_hoelder(const double* x, std::size_t n, std::size_t dim, double h, double exponent, Exec e) {
    if (n < 2) return 0.0;
    return use_parallel(e, n) ? path_hoelder_parallel(x, n, dim, h, exponent)
                              : path_hoelder_serial(x, n, dim, h, exponent);
}

std::vector<double> convolve_serial(const double* x, std::size_t n, std::size_t dim,
                                    const std::vector<double>& w) {
    if (w.empty() || w.size() > n) throw std::invalid_argument("convolve: kernel longer than input");
    const std::size_t E = w.size() - 1, m = n - E;
    std::vector<double> out(m * dim, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t q = 0; q <= E; ++q)
            for (std::size_t c = 0; c < dim; ++c) out[i * dim + c] += w[q] * x[(i + E - q) * dim + c];
    return out;
}

std::vector<double> convolve_parallel(const double* x, std::size_t n, std::size_t dim,
                                      const std::vector<double>& w) {
    if (w.empty() || w.size() > n) throw std::invalid_argument("convolve: kernel longer than input");
    const std::size_t E = w.size() - 1, m = n - E;
    std::vector<double> out(m * dim, 0.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t q = 0; q <= E; ++q)
            for (std::size_t c = 0; c < dim; ++c) out[i * dim + c] += w[q] * x[(i + E - q) * dim + c];
    }
    return out;
}

std::vector<double> convolve(const double* x, std::size_t n, std::size_t dim,
                             const std::vector<double>& w, Exec e) {
    return use_parallel(e, n) ? convolve_parallel(x, n, dim, w) : convolve_serial(x, n, dim, w);
}

}  // namespace rdde::kernels
