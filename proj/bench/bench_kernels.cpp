// Compares the serial reference kernels against the OpenMP versions on the
// shapes the training loop actually runs (aggregation-sized matmuls), and
// checks that both produce identical bytes.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "fatra/kernels.hpp"
#include "fatra/rng.hpp"

#ifdef FATRA_OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

namespace {

double run_gflops(void (*f)(const double*, const double*, double*, std::size_t,
                            std::size_t, std::size_t, bool),
                  const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& c, std::size_t r, std::size_t k, std::size_t m,
                  int reps) {
    f(a.data(), b.data(), c.data(), r, k, m, false);  // warm-up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) f(a.data(), b.data(), c.data(), r, k, m, false);
    const auto t1 = Clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    const double flops = 2.0 * static_cast<double>(r) * k * m * reps;
    return flops / secs / 1e9;
}

}  // namespace

int main() {
#ifdef FATRA_OPENMP
    std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp disabled (serial build)\n");
#endif

    struct Shape {
        std::size_t r, k, m;
        int reps;
    };
    const Shape shapes[] = {
        {1000, 1000, 16, 20},  // aggregation pass, training width
        {1000, 1000, 400, 2},  // aggregation pass, theory width
        {1000, 16, 16, 500},   // dense layer
        {256, 256, 256, 20},   // square reference point
    };

    fatra::Rng rng(7);
    std::printf("%-18s %10s %10s %8s %8s\n", "shape", "serial", "omp", "speedup",
                "bitwise");
    for (const Shape& s : shapes) {
        std::vector<double> a(s.r * s.k);
        std::vector<double> b(s.k * s.m);
        std::vector<double> c1(s.r * s.m);
        std::vector<double> c2(s.r * s.m);
        for (double& v : a) v = rng.normal();
        for (double& v : b) v = rng.normal();

        const double gs = run_gflops(fatra::kern::serial::matmul, a, b, c1, s.r, s.k,
                                     s.m, s.reps);
        const double gp = run_gflops(fatra::kern::omp::matmul, a, b, c2, s.r, s.k, s.m,
                                     s.reps);
        const bool same =
            std::memcmp(c1.data(), c2.data(), c1.size() * sizeof(double)) == 0;
        char name[64];
        std::snprintf(name, sizeof(name), "%zux%zux%zu", s.r, s.k, s.m);
        std::printf("%-18s %7.2f GF %7.2f GF %7.2fx %8s\n", name, gs, gp, gp / gs,
                    same ? "yes" : "NO");
    }
    return 0;
}
