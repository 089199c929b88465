#include <cmath>

#include "doctest.h"
#include "gpmem/kernel.hpp"
#include "support.hpp"

using namespace gpmem;

TEST_SUITE("kernel") {
  TEST_CASE("closed-form transforms") {
    CHECK(laplace_of_kernel(MemoryKernel::constant(1.0), {2.0, 0.0}).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(laplace_of_kernel(MemoryKernel::exponential(1.0), {1.0, 0.0}).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(laplace_of_kernel(MemoryKernel::polynomial_half_square(), {2.0, 0.0}).real() ==
          doctest::Approx(0.125).epsilon(1e-15));
    CHECK(std::abs(laplace_of_kernel(MemoryKernel::dirac_delta(), {3.0, 4.0}) - Complex(1.0, 0.0)) < 1e-15);
    // ((t-2)^+)^2 -> 2 e^{-2z} / z^3
    const Complex z{1.5, 0.7};
    CHECK(std::abs(laplace_of_kernel(MemoryKernel::shifted_power(2.0, 2, 1.0), z) - 2.0 * std::exp(-2.0 * z) / (z * z * z)) <
          1e-15);
  }

  TEST_CASE("transform needs Re z > 0") {
    CHECK_GPMEM_ERROR(laplace_of_kernel(MemoryKernel::constant(1.0), {0.0, 1.0}), ErrorCode::NonpositiveRealPart);
    CHECK_GPMEM_ERROR(laplace_of_kernel(MemoryKernel::exponential(1.0), {-1.0, 0.0}), ErrorCode::NonpositiveRealPart);
  }

  TEST_CASE("sampled kernel that outgrows the damping is rejected") {
    const MemoryKernel k = MemoryKernel::sampled(TimeSignal::sample([](double t) { return std::exp(3.0 * t); }, 0.01, 10.0));
    CHECK_GPMEM_ERROR(k.laplace({1.0, 0.0}), ErrorCode::QuadratureDivergence);
  }

  TEST_CASE("conjugate symmetry for every form") {
    const MemoryKernel forms[] = {
        MemoryKernel::constant(2.0),
        MemoryKernel::exponential(0.7, 1.3),
        MemoryKernel::polynomial_half_square(),
        MemoryKernel::dirac_delta(0.5),
        MemoryKernel::shifted_power(1.0, 3, 0.2),
        MemoryKernel::sampled(TimeSignal::sample([](double t) { return std::exp(-t); }, 0.01, 20.0)),
    };
    for (const auto& k : forms) {
      for (double re : {0.3, 1.0, 7.0}) {
        for (double im : {0.5, 3.0, 40.0}) {
          const Complex z{re, im};
          CHECK(std::abs(laplace_of_kernel(k, std::conj(z)) - std::conj(laplace_of_kernel(k, z))) <=
                1e-15 * std::abs(laplace_of_kernel(k, z)));
        }
      }
    }
  }

  TEST_CASE("sampled exponential agrees with 1/(z+b) within its bound") {
    const double b = 1.0;
    const MemoryKernel k = MemoryKernel::sampled(TimeSignal::sample([&](double t) { return std::exp(-b * t); }, 1e-3, 20.0));
    for (const Complex z : {Complex{1.0, 0.0}, Complex{1.0, 5.0}, Complex{3.0, -20.0}, Complex{10.0, 100.0}}) {
      const KernelTransform kt = k.laplace(z);
      // The piecewise-linear interpolant differs from e^{-t} by O(dt^2) per unit time.
      const double quad = 1e-3 * 1e-3 / 8.0;
      CHECK(std::abs(kt.value - 1.0 / (z + b)) <= quad + kt.truncation_bound);
    }
  }

  TEST_CASE("sums are linear") {
    const MemoryKernel parts[] = {MemoryKernel::constant(1.0), MemoryKernel::constant(-0.5)};
    const MemoryKernel s = MemoryKernel::sum(parts);
    const Complex z{0.4, 1.1};
    CHECK(std::abs(laplace_of_kernel(s, z) - 0.5 / z) < 1e-15);
    CHECK(s.value(3.0) == doctest::Approx(0.5));
  }

  TEST_CASE("time-domain values") {
    CHECK(MemoryKernel::exponential(2.0, 3.0).value(0.5) == doctest::Approx(3.0 * std::exp(-1.0)));
    CHECK(MemoryKernel::shifted_power(2.0, 2, 1.0).value(1.5) == 0.0);
    CHECK(MemoryKernel::shifted_power(2.0, 2, 1.0).value(3.0) == doctest::Approx(1.0));
    CHECK(MemoryKernel::polynomial_half_square().value(2.0) == doctest::Approx(2.0));
    CHECK_GPMEM_ERROR(MemoryKernel::dirac_delta().value(0.1), ErrorCode::InvalidArgument);
    CHECK(MemoryKernel::dirac_delta(0.5).atom_at_zero() == 0.5);
    CHECK_FALSE(MemoryKernel::dirac_delta().wave_speed_sq().has_value());
  }

  TEST_CASE("K0 admissibility") {
    const auto probes = default_k0_probes();
    const K0Report c = validate_K0(MemoryKernel::constant(1.0), probes);
    CHECK(c.admissible);
    CHECK(c.a == 1.0);
    CHECK(c.max_residual == doctest::Approx(0.0).epsilon(1e-12));

    const K0Report c4 = validate_K0(MemoryKernel::constant(4.0), probes);
    CHECK(c4.a == 2.0);

    const K0Report e = validate_K0(MemoryKernel::exponential(1.0), probes);
    CHECK(e.admissible);
    CHECK(e.a == doctest::Approx(1.0));
    // z^2 (K - 1/z) = -z/(z+1) stays bounded by 1.
    CHECK(e.max_residual <= 1.0 + 1e-12);

    CHECK_FALSE(validate_K0(MemoryKernel::polynomial_half_square(), probes).admissible);
    CHECK_FALSE(validate_K0(MemoryKernel::dirac_delta(), probes).admissible);
  }

  TEST_CASE("K0 for a sampled kernel without the time evaluator path") {
    const auto probes = default_k0_probes();
    const MemoryKernel k = MemoryKernel::sampled(TimeSignal::sample([](double t) { return 2.0 * std::exp(-t); }, 1e-3, 30.0));
    const K0Report r = validate_K0(k, probes, 1e-6);
    CHECK(r.a_sq == doctest::Approx(2.0));
  }

  TEST_CASE("no zeros on grids") {
    const double slopes[] = {0.0, 1.0, 3.0};
    const FrequencyGrid g = FrequencyGrid::fan(0.1, 10.0, 12, slopes);
    CHECK(validate_no_zeros(MemoryKernel::constant(1.0), g));
    CHECK(validate_no_zeros(MemoryKernel::exponential(1.0), g));
    const MemoryKernel parts[] = {MemoryKernel::constant(1.0), MemoryKernel::constant(-0.5)};
    CHECK(validate_no_zeros(MemoryKernel::sum(parts), g));
    const MemoryKernel cancel[] = {MemoryKernel::constant(1.0), MemoryKernel::constant(-1.0)};
    CHECK_FALSE(validate_no_zeros(MemoryKernel::sum(cancel), g));
  }

  TEST_CASE("describe is stable") {
    CHECK(MemoryKernel::exponential(1.0).describe() == "exponential(decay=1,amplitude=1)");
  }
}
