#include "goldlab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#define GOLDLAB_X86 1
#endif

#if defined(GOLDLAB_X86) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

// AVX2 variants (4 doubles per lane). Order-preserving ops use explicit
// mul+add, never FMA, so they stay bit-identical to the scalar reference;
// the dot-style reductions split the sum across 2 accumulators and are only
// tolerance-equivalent.

namespace goldlab::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void matmul_nn_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const __m256d ail = _mm256_set1_pd(arow[l]);
            const double* brow = b + l * n;
            std::size_t j = 0;
            for (; j < n4; j += 4) {
                __m256d acc = _mm256_loadu_pd(crow + j);
                __m256d prod = _mm256_mul_pd(ail, _mm256_loadu_pd(brow + j));
                _mm256_storeu_pd(crow + j, _mm256_add_pd(acc, prod));
            }
            const double ail_s = arow[l];
            for (; j < n; ++j) crow[j] += ail_s * brow[j];
        }
    }
}

void matmul_nt_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
    const std::size_t k8 = k & ~std::size_t{7};
    const std::size_t k4 = k & ~std::size_t{3};
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            std::size_t l = 0;
            for (; l < k8; l += 8) {
                acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(arow + l),
                                                         _mm256_loadu_pd(brow + l)));
                acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(arow + l + 4),
                                                         _mm256_loadu_pd(brow + l + 4)));
            }
            for (; l < k4; l += 4) {
                acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(arow + l),
                                                         _mm256_loadu_pd(brow + l)));
            }
            double acc = hsum(_mm256_add_pd(acc0, acc1));
            for (; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] = acc;
        }
    }
}

void matmul_tn_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t l = 0; l < k; ++l) {
        const double* arow = a + l * m;
        const double* brow = b + l * n;
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d ali = _mm256_set1_pd(arow[i]);
            double* crow = c + i * n;
            std::size_t j = 0;
            for (; j < n4; j += 4) {
                __m256d acc = _mm256_loadu_pd(crow + j);
                __m256d prod = _mm256_mul_pd(ali, _mm256_loadu_pd(brow + j));
                _mm256_storeu_pd(crow + j, _mm256_add_pd(acc, prod));
            }
            const double ali_s = arow[i];
            for (; j < n; ++j) crow[j] += ali_s * brow[j];
        }
    }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    const std::size_t n8 = n & ~std::size_t{7};
    const std::size_t n4 = n & ~std::size_t{3};
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i < n8; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                 _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                                 _mm256_loadu_pd(b + i + 4)));
    }
    for (; i < n4; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                 _mm256_loadu_pd(b + i)));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    const std::size_t n4 = n & ~std::size_t{3};
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_bias_rows_avx2(double* y, const double* bias, std::size_t rows, std::size_t cols) {
    const std::size_t c4 = cols & ~std::size_t{3};
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = y + r * cols;
        std::size_t j = 0;
        for (; j < c4; j += 4) {
            _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j),
                                                    _mm256_loadu_pd(bias + j)));
        }
        for (; j < cols; ++j) row[j] += bias[j];
    }
}

void col_sums_avx2(const double* a, double* out, std::size_t rows, std::size_t cols) {
    std::memset(out, 0, cols * sizeof(double));
    const std::size_t c4 = cols & ~std::size_t{3};
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        std::size_t j = 0;
        for (; j < c4; j += 4) {
            _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j),
                                                    _mm256_loadu_pd(row + j)));
        }
        for (; j < cols; ++j) out[j] += row[j];
    }
}

void leaky_relu_fwd_avx2(const double* z, double* y, std::size_t n, double slope) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sv = _mm256_set1_pd(slope);
    const std::size_t n4 = n & ~std::size_t{3};
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        __m256d zi = _mm256_loadu_pd(z + i);
        __m256d pos = _mm256_cmp_pd(zi, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(y + i, _mm256_blendv_pd(_mm256_mul_pd(sv, zi), zi, pos));
    }
    for (; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : slope * z[i];
}

void leaky_relu_bwd_avx2(const double* z, const double* dy, double* dz,
                         std::size_t n, double slope) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sv = _mm256_set1_pd(slope);
    const std::size_t n4 = n & ~std::size_t{3};
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        __m256d zi = _mm256_loadu_pd(z + i);
        __m256d gi = _mm256_loadu_pd(dy + i);
        __m256d pos = _mm256_cmp_pd(zi, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dz + i, _mm256_blendv_pd(_mm256_mul_pd(sv, gi), gi, pos));
    }
    for (; i < n; ++i) dz[i] = z[i] > 0.0 ? dy[i] : slope * dy[i];
}

void adam_update_avx2(double* p, double* m, double* v, const double* g, std::size_t n,
                      double lr, double beta1, double beta2, double eps,
                      double bc1, double bc2) {
    const __m256d b1 = _mm256_set1_pd(beta1);
    const __m256d b2 = _mm256_set1_pd(beta2);
    const __m256d ob1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d ob2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d bc1v = _mm256_set1_pd(bc1);
    const __m256d bc2v = _mm256_set1_pd(bc2);
    const std::size_t n4 = n & ~std::size_t{3};
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                   _mm256_mul_pd(ob1, gi));
        __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(ob2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        __m256d mhat = _mm256_div_pd(mi, bc1v);
        __m256d vhat = _mm256_div_pd(vi, bc2v);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        __m256d step = _mm256_mul_pd(lrv, _mm256_div_pd(mhat, denom));
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

}  // namespace

const Ops* avx2() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Ops ops = {
        matmul_nn_avx2, matmul_nt_avx2, matmul_tn_avx2,
        dot_avx2,       axpy_avx2,      add_bias_rows_avx2,
        col_sums_avx2,  leaky_relu_fwd_avx2, leaky_relu_bwd_avx2,
        adam_update_avx2,
        "avx2",
    };
    return &ops;
}

}  // namespace goldlab::kernels

#else  // no AVX2 in this build

namespace goldlab::kernels {
const Ops* avx2() { return nullptr; }
}  // namespace goldlab::kernels

#endif
