// Timing comparison of the serial and OpenMP stiffness kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fracheat/assembly.hpp"

namespace {

double seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> sizes = {128, 256, 512};
  if (argc > 1) {
    sizes.clear();
    for (int i = 1; i < argc; ++i) sizes.push_back(std::atoi(argv[i]));
  }

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%8s %12s %12s %9s %12s\n", "N", "serial[s]", "parallel[s]", "speedup",
              "max|diff|");

  const fracheat::FracParams params(0.8, 1.7, 1.9);
  for (int n : sizes) {
    const fracheat::Mesh1D mesh = fracheat::build_mesh(n, params);

    fracheat::AssemblyOptions serial_opt;
    serial_opt.parallel = false;

    const double t0 = seconds();
    const Eigen::MatrixXd a_serial =
        fracheat::assemble_stiffness_serial(mesh, params, serial_opt);
    const double t1 = seconds();
    const fracheat::NonlocalAssembly parallel = fracheat::assemble(mesh, params);
    const double t2 = seconds();

    const double diff = (a_serial - parallel.stiffness).cwiseAbs().maxCoeff();
    std::printf("%8d %12.3f %12.3f %9.2f %12.3e\n", n, t1 - t0, t2 - t1,
                (t1 - t0) / (t2 - t1), diff);
  }
  return 0;
}
