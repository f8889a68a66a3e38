#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "fsuc/system_model.hpp"

namespace fsuc {

// No finite PFR can satisfy the nadir limit at this inertia.
struct InfeasibleInertiaError : std::domain_error {
  using std::domain_error::domain_error;
};
// Total response never covers the loss, so frequency keeps falling.
struct NoNadirError : std::domain_error {
  using std::domain_error::domain_error;
};

// Post-fault service volumes: inertia in MW*s, EFR and PFR in MW.
struct ServicePoint {
  double inertia = 0.0;
  double efr = 0.0;
  double pfr = 0.0;
};

// Deviations are <= 0 after a generation loss; limits compare magnitudes.
struct FrequencyTrajectory {
  std::vector<double> times;       // s
  std::vector<double> deviations;  // Hz
  double nadir_dev = 0.0;          // max |deviation|, Hz
  double nadir_time = 0.0;         // s
  double initial_rocof = 0.0;      // Hz/s, closed form
  double qss_dev = 0.0;            // deviation at 60 s, Hz
};

// H >= P_L * f0 / (2 RoCoF_max), in MW*s.
double min_inertia_for_rocof(const FrequencyParams& fp);

// LHS - RHS of the nadir condition
//   (H/f0 - EFR*T_EFR/(4 df)) * PFR >= (P_L - EFR)^2 * T_PFR / (4 df).
// Non-negative means secure.
double check_nadir(const ServicePoint& sp, const FrequencyParams& fp);

// Smallest PFR with check_nadir >= 0. Zero when efr covers the loss.
// Throws InfeasibleInertiaError when the inertia term is not positive.
double min_pfr_for_nadir(double inertia, double efr, const FrequencyParams& fp);

// Quasi-steady-state: total response covers the loss.
bool check_qss(double efr, double pfr, double largest_loss);

// Closed-form |df| at the nadir under linear EFR/PFR ramps.
// Throws NoNadirError when efr + pfr < P_L.
double analytic_nadir(const ServicePoint& sp, const FrequencyParams& fp);

// Instant at which delivered response first equals the loss; +inf if never.
double response_crossing_time(const ServicePoint& sp, const FrequencyParams& fp);

// Fixed-step RK4 on the swing equation with ramp breakpoints as sample points.
// Requires H > 0, dt > 0 and t_end >= 60.
FrequencyTrajectory simulate_post_fault(const ServicePoint& sp, const FrequencyParams& fp, double dt = 1e-3,
                                        double t_end = 60.0);

// Trajectory as CSV `t,delta_f`.
void write_trajectory_csv(const std::filesystem::path& path, const FrequencyTrajectory& traj);

namespace kernels {

// Simulated nadir magnitude for each point, one RK4 run per entry.
void batch_nadir_serial(std::span<const ServicePoint> points, const FrequencyParams& fp, double dt,
                        std::span<double> out);
void batch_nadir_omp(std::span<const ServicePoint> points, const FrequencyParams& fp, double dt,
                     std::span<double> out);

}  // namespace kernels

}  // namespace fsuc
