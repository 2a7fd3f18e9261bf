#pragma once

#include <cstddef>
#include <string>

// Hot arithmetic loops behind function pointers so the scalar reference and
// the AVX2 variants stay interchangeable. Selection happens once per process
// (first use), which keeps a (seed, config) run bitwise reproducible.
//
// Equivalence contract, checked in tests/kernels_test.cpp:
//   - order-preserving ops (matmul_nn, matmul_tn, axpy, col_sums, bias add,
//     leaky-relu, adam_update) are bit-identical between variants because the
//     AVX2 code uses the same operation order and no FMA;
//   - reduction ops (dot, matmul_nt) re-associate the sum across lanes and are
//     compared at 1e-12 relative tolerance.

namespace goldlab::kernels {

struct Ops {
    // C[m x n] = A[m x k] * B[k x n]
    void (*matmul_nn)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
    // C[m x n] = A[m x k] * B^T, B stored [n x k]
    void (*matmul_nt)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
    // C[m x n] = A^T * B, A stored [k x m], B stored [k x n]
    void (*matmul_tn)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y[r, :] += bias for every row r; y stored [rows x cols]
    void (*add_bias_rows)(double* y, const double* bias, std::size_t rows, std::size_t cols);
    // out[j] = sum_r a[r, j]
    void (*col_sums)(const double* a, double* out, std::size_t rows, std::size_t cols);
    // slope = 0 gives plain relu
    void (*leaky_relu_fwd)(const double* z, double* y, std::size_t n, double slope);
    void (*leaky_relu_bwd)(const double* z, const double* dy, double* dz,
                           std::size_t n, double slope);
    // Adam with bias correction folded in: p -= lr * (m/bc1) / (sqrt(v/bc2) + eps)
    void (*adam_update)(double* p, double* m, double* v, const double* g, std::size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2);
    const char* name;
};

const Ops& scalar();
const Ops* avx2();  // nullptr when the CPU or the build lacks AVX2

// Active variant. Default: AVX2 when available, else scalar; the environment
// variable GOLDLAB_KERNELS=scalar|avx2|auto overrides the default.
const Ops& active();

// Force a variant by name ("scalar", "avx2", "auto"); throws ConfigError for
// unknown names or unavailable variants. Intended for tests and benchmarks.
void select(const std::string& name);

}  // namespace goldlab::kernels
