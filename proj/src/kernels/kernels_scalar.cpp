#include <cmath>
#include <cstring>

#include "goldlab/kernels.hpp"

// Reference kernels. Loop orders here define the numeric contract the SIMD
// variants must reproduce (see kernels.hpp).

namespace goldlab::kernels {
namespace {

void matmul_nn_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const double ail = arow[l];
            const double* brow = b + l * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += ail * brow[j];
            }
        }
    }
}

void matmul_nt_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                acc += arow[l] * brow[l];
            }
            crow[j] = acc;
        }
    }
}

void matmul_tn_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t l = 0; l < k; ++l) {
        const double* arow = a + l * m;
        const double* brow = b + l * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double ali = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += ali * brow[j];
            }
        }
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_bias_rows_scalar(double* y, const double* bias, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = y + r * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += bias[j];
    }
}

void col_sums_scalar(const double* a, double* out, std::size_t rows, std::size_t cols) {
    std::memset(out, 0, cols * sizeof(double));
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        for (std::size_t j = 0; j < cols; ++j) out[j] += row[j];
    }
}

void leaky_relu_fwd_scalar(const double* z, double* y, std::size_t n, double slope) {
    for (std::size_t i = 0; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : slope * z[i];
}

void leaky_relu_bwd_scalar(const double* z, const double* dy, double* dz,
                           std::size_t n, double slope) {
    for (std::size_t i = 0; i < n; ++i) dz[i] = z[i] > 0.0 ? dy[i] : slope * dy[i];
}

void adam_update_scalar(double* p, double* m, double* v, const double* g, std::size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

}  // namespace

const Ops& scalar() {
    static const Ops ops = {
        matmul_nn_scalar, matmul_nt_scalar, matmul_tn_scalar,
        dot_scalar,       axpy_scalar,      add_bias_rows_scalar,
        col_sums_scalar,  leaky_relu_fwd_scalar, leaky_relu_bwd_scalar,
        adam_update_scalar,
        "scalar",
    };
    return ops;
}

}  // namespace goldlab::kernels
