#include <cmath>

#include "doctest.h"
#include "gpmem/inverse.hpp"
#include "oracles/oracle_values.hpp"
#include "support.hpp"

using namespace gpmem;

namespace {

const BoundaryControl ramp = BoundaryControl::ramp();

FrequencyGrid finite_data_grid() {
  const double slopes[] = {0.0, 0.5, 1.0};
  return FrequencyGrid::fan(1.0, 10.0, 7, slopes);
}

ReconstructionResult recover_synthetic(const MemoryKernel& k, double T_obs, bool check = false,
                                       const ContourSpec& contour = Talbot{}) {
  const ResponseRecord rec = make_synthetic_record(k, Geometry::semi_axis(), 2e-3, T_obs, contour);
  FiniteDataOptions o;
  o.consistency_check = check;
  return recover_from_finite_data(rec, T_obs, finite_data_grid(), BromwichFFT{0.1, 500.0, 4096}, o);
}

}  // namespace

TEST_SUITE("inverse") {
  TEST_CASE("semi-axis recovery of K") {
    const Complex z{3.0, 0.0};
    CHECK(std::abs(recover_K_semiaxis(-1.0 / z, 1.0 / (z * z), z) - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(recover_K_semiaxis(-std::pow(z, -1.5), 1.0 / (z * z), z) - 1.0) < 1e-15);
    CHECK_GPMEM_ERROR(recover_K_semiaxis(0.0, 1.0, z), ErrorCode::ZeroResponse);
    CHECK_GPMEM_ERROR(recover_K_semiaxis(-1.0 / z, 0.0, z), ErrorCode::ZeroResponse);
    // Sign-flipped data square to the same K but fail the branch check.
    CHECK_GPMEM_ERROR(recover_K_semiaxis(1.0 / z, 1.0 / (z * z), z), ErrorCode::BranchMismatch);
  }

  TEST_CASE("round trip K -> R -> K on a grid") {
    const double slopes[] = {0.0, 1.0, 3.0};
    const MemoryKernel k = MemoryKernel::exponential(1.0);
    const FrequencyGrid g = FrequencyGrid::fan(0.2, 40.0, 7, slopes);
    REQUIRE(g.points().size() >= 20);
    for (const Complex z : g.points()) {
      const Complex K = k.laplace(z).value;
      const Complex back = recover_K_semiaxis(response_semiaxis(k, ramp, z), ramp.transform(z), z);
      CHECK(std::abs(back - K) <= 1e-14 * std::abs(K));
    }
  }

  TEST_CASE("interval recovery of omega") {
    const MemoryKernel c = MemoryKernel::constant(1.0);
    const Complex one{1.0, 0.0};
    const Complex w = recover_omega_interval(response_interval(c, ramp, 1.0, one), ramp.transform(one), 1.0, one);
    CHECK(std::abs(w - 1.0) < 1e-12);

    // coth(omega L) = 1 to double precision at L = 30.
    const MemoryKernel e = MemoryKernel::exponential(1.0);
    const Complex two{2.0, 0.0};
    const Complex R30 = response_interval(e, ramp, 30.0, two);
    const Complex F2 = ramp.transform(two);
    CHECK(std::abs(recover_omega_interval(R30, F2, 30.0, two) + R30 / F2) < 1e-14);
    CHECK(std::abs(recover_omega_interval(R30, F2, 30.0, two) - std::sqrt(two * (two + 1.0))) < 1e-8);

    const Complex z{1.0, 1.0};
    const Complex wz = recover_omega_interval(response_interval(e, ramp, 2.0, z), ramp.transform(z), 2.0, z);
    CHECK(std::abs(wz - oracle::omega_exp_z1p1i) < 1e-10);
    const Complex z2{0.5, -2.0};
    const Complex w2 = recover_omega_interval(response_interval(e, ramp, 2.0, z2), ramp.transform(z2), 2.0, z2);
    CHECK(std::abs(w2 - oracle::omega_exp_z0p5m2i) < 1e-10);
  }

  TEST_CASE("kernel reconstruction from K(z)") {
    const std::vector<double> ts = linspace(0.0, 5.0, 51);
    const TimeSignal k1 = reconstruct_kernel_time([](Complex z) { return 1.0 / z; }, 1.0, ts, Talbot{});
    for (double v : k1.values()) CHECK(std::abs(v - 1.0) < 1e-8);

    const TimeSignal ke = reconstruct_kernel_time([](Complex z) { return 1.0 / (z + 1.0); }, 1.0, ts, Talbot{});
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(ke[i] - std::exp(-ts[i])) < 1e-7);
    CHECK(std::abs(ke[10] - 0.36787944117144233) < 1e-7);

    const TimeSignal ks = reconstruct_kernel_time([](Complex z) { return 2.0 / z + 1.0 / ((z + 3.0) * (z + 3.0)); },
                                                  std::sqrt(2.0), ts, Talbot{});
    CHECK(std::abs(ks[5] - (2.0 + 0.5 * std::exp(-1.5))) < 1e-7);
    CHECK(std::abs(ks[5] - oracle::k_sum_t0_5) < 1e-7);

    CHECK_GPMEM_ERROR(reconstruct_kernel_time([](Complex z) { return 1.0 / (z * z); }, 1.0, ts, Talbot{}),
                      ErrorCode::K0Violation);
  }

  TEST_CASE("infinite-data round trip on [0, 5]") {
    const std::vector<double> ts = linspace(0.0, 5.0, 101);
    for (const MemoryKernel& k : {MemoryKernel::constant(1.0), MemoryKernel::exponential(1.0)}) {
      // Talbot nodes reach Re z < 0, where R is the continuation -omega/z^2.
      const Evaluator K = kernel_from_response([&](Complex z) { return -omega_continued(k, z, 1.0) / (z * z); },
                                               [&](Complex z) { return ramp.transform(z); });
      const TimeSignal rec = reconstruct_kernel_time(K, 1.0, ts, Talbot{});
      for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(rec[i] - k.value(ts[i])) < 1e-6);
    }
  }

  TEST_CASE("synthetic records start at -1/a") {
    const ResponseRecord rec = make_synthetic_record(MemoryKernel::constant(4.0), Geometry::semi_axis(), 0.1, 2.0);
    for (double v : rec.r.values()) CHECK(v == doctest::Approx(-0.5).epsilon(1e-9));
    const ResponseRecord re = make_synthetic_record(MemoryKernel::exponential(1.0), Geometry::semi_axis(), 0.5, 5.0);
    CHECK(std::abs(re.r[1] - oracle::r_exp_t0_5) < 1e-9);
    CHECK(std::abs(re.r[4] - oracle::r_exp_t2_0) < 1e-9);
    CHECK(std::abs(re.r[10] - oracle::r_exp_t5_0) < 1e-9);
  }

  TEST_CASE("finite data: constant kernel") {
    const ReconstructionResult res = recover_synthetic(MemoryKernel::constant(1.0), 20.0);
    CHECK(res.a_estimate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.T_reliable >= 5.0);
    for (std::size_t i = 0; i < res.k.size() && res.k.time(i) <= 10.0; ++i) CHECK(std::abs(res.k[i] - 1.0) < 1e-3);
    for (std::size_t i = 0; i < res.k.size() && res.k.time(i) <= res.T_reliable; ++i) {
      CHECK(std::abs(res.k[i] - 1.0) <= std::max(res.k_error[i], 1e-3));
    }
  }

  TEST_CASE("finite data: exponential kernel") {
    const ReconstructionResult res = recover_synthetic(MemoryKernel::exponential(1.0), 20.0, true);
    CHECK(res.T_reliable >= 5.0);
    CHECK(res.consistency_residual >= 0.0);
    for (std::size_t i = 0; i < res.k.size() && res.k.time(i) <= 5.0; ++i) {
      CHECK(std::abs(res.k[i] - std::exp(-res.k.time(i))) < 1e-2);
    }
    for (const KSample& s : res.K_samples) {
      if (s.gated) CHECK(std::abs(s.K - 1.0 / (s.z + 1.0)) <= s.error + 1e-12);
    }
  }

  TEST_CASE("finite data: too short a horizon") {
    const ResponseRecord rec = make_synthetic_record(MemoryKernel::constant(1.0), Geometry::semi_axis(), 1e-3, 0.1);
    bool refused = false;
    double T_reliable = -1.0;
    try {
      T_reliable = recover_from_finite_data(rec, 0.1, finite_data_grid(), BromwichFFT{0.1, 500.0, 4096}).T_reliable;
    } catch (const Error& e) {
      refused = e.code() == ErrorCode::InsufficientHorizon;
    }
    CHECK((refused || T_reliable < 0.5));
  }

  TEST_CASE("T_reliable does not shrink as the horizon grows") {
    double last = 0.0;
    for (double T_obs : {5.0, 10.0, 20.0, 40.0}) {
      const double Tr = recover_synthetic(MemoryKernel::exponential(1.0), T_obs).T_reliable;
      CHECK(Tr >= last);
      last = Tr;
    }
  }

  TEST_CASE("kernels equal on [0, T] give equal reconstructions there") {
    // k2 = k1 + 0.01 (t - 3)_+^2. K2 vanishes near z = 0.151 +/- 0.194i, so
    // r2 grows like e^{0.151 t} and both records come from a line right of it.
    const double T = 3.0, T_obs = 10.0;
    const MemoryKernel k1 = MemoryKernel::exponential(1.0);
    const MemoryKernel parts[] = {k1, MemoryKernel::shifted_power(T, 2, 0.01)};
    const MemoryKernel k2 = MemoryKernel::sum(parts);
    const BromwichFFT line{0.3, 200.0, 3200};
    const ResponseRecord r1 = make_synthetic_record(k1, Geometry::semi_axis(), 2e-3, T_obs, line);
    const ResponseRecord r2 = make_synthetic_record(k2, Geometry::semi_axis(), 2e-3, T_obs, line);
    FiniteDataOptions o;
    o.consistency_check = false;
    const BromwichFFT k_line{0.1, 500.0, 4096};

    // Up to T the records agree to the accuracy of the line sums, and so do
    // reconstructions that see only [0, T].
    double record_diff = 0.0;
    for (std::size_t i = 0; r1.r.time(i) <= T; ++i) record_diff = std::max(record_diff, std::abs(r1.r[i] - r2.r[i]));
    CHECK(record_diff < 1e-6);
    const ReconstructionResult s1 = recover_from_finite_data(r1, T, finite_data_grid(), k_line, o);
    const ReconstructionResult s2 = recover_from_finite_data(r2, T, finite_data_grid(), k_line, o);
    for (std::size_t i = 0; i < s1.k.size() && s1.k.time(i) <= std::min(s1.T_reliable, s2.T_reliable); ++i) {
      CHECK(std::abs(s1.k[i] - s2.k[i]) <= s1.k_error[i] + s2.k_error[i]);
    }

    const ReconstructionResult a = recover_from_finite_data(r1, T_obs, finite_data_grid(), k_line, o);
    const ReconstructionResult b = recover_from_finite_data(r2, T_obs, finite_data_grid(), k_line, o);
    const double limit = std::min({T, a.T_reliable, b.T_reliable});
    CHECK(limit > 1.0);
    for (std::size_t i = 0; i < a.k.size() && a.k.time(i) <= limit; ++i) {
      CHECK(std::abs(a.k[i] - b.k[i]) <= a.k_error[i] + b.k_error[i]);
    }
  }
}
