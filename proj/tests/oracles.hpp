#pragma once

// Reference implementations used only by the tests. They are written
// straight from the model and share no code paths with the library beyond
// plain data types.

#include <complex>
#include <cstddef>
#include <vector>

#include "mmwshare/codebook.hpp"
#include "mmwshare/harness.hpp"
#include "mmwshare/scheduler.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// Element (m, n) -> exp(-i pi (m cos az cos el + n sin el)) / sqrt(N), laid
/// out with n fastest.
std::vector<cplx> steering(std::size_t nh, std::size_t nv, double azimuth, double elevation);

/// exp(-i 2 pi (m h / nh + n v / nv)) / sqrt(N).
std::vector<cplx> dft_beam(std::size_t nh, std::size_t nv, std::size_t h, std::size_t v);

/// |sum conj(a_i) b_i|^2.
double power(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// SINR of UE u among the given co-scheduled UEs, interference summed in UE
/// index order.
double sinr(std::size_t u, const std::vector<std::size_t>& slot, const mmwshare::PowerMatrix& p, double noise);

/// Maximum frame sum-rate over every way of ordering each BS's UEs over the
/// slots (no symmetry reduction). Rates are summed in UE index order.
double brute_force_sum_rate(const std::vector<std::vector<std::size_t>>& ues_by_bs, const mmwshare::PowerMatrix& p,
                            double noise);

/// Expected leakage of (b, serving beam) onto a UE uniform in the footprint
/// of (j, reported beam), recomputed on a grid `refine` times finer.
struct RefinedEntry {
  double leakage = 0.0;
  double serving_area = 0.0;
  double reported_area = 0.0;
};
RefinedEntry refined_leakage(const mmwshare::ScenarioConfig& config, std::size_t b, std::size_t serving, std::size_t j,
                             std::size_t reported, std::size_t refine);

/// Nearest site by squared ground+height distance, first index on ties.
std::vector<std::size_t> nearest_scan(const std::vector<mmwshare::Position>& ues,
                                      const std::vector<mmwshare::Position>& sites);

}  // namespace oracle
