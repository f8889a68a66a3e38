#include "fsuc/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace fsuc {

double min_inertia_for_rocof(const FrequencyParams& fp) {
  return fp.largest_loss * fp.f0 / (2.0 * fp.rocof_max);
}

double check_nadir(const ServicePoint& sp, const FrequencyParams& fp) {
  const double k = 4.0 * fp.delta_f_max;
  const double lhs = (sp.inertia / fp.f0 - sp.efr * fp.t_efr / k) * sp.pfr;
  const double uncovered = fp.largest_loss - sp.efr;
  const double rhs = uncovered * uncovered * fp.t_pfr / k;
  return lhs - rhs;
}

double min_pfr_for_nadir(double inertia, double efr, const FrequencyParams& fp) {
  if (efr >= fp.largest_loss) return 0.0;
  const double k = 4.0 * fp.delta_f_max;
  const double factor = inertia / fp.f0 - efr * fp.t_efr / k;
  if (!(factor > 0.0))
    throw InfeasibleInertiaError("inertia " + std::to_string(inertia) +
                                 " MW*s leaves no positive nadir margin; no finite PFR suffices");
  const double uncovered = fp.largest_loss - efr;
  double pfr = uncovered * uncovered * fp.t_pfr / k / factor;
  // Land on the secure side of the rounding boundary.
  for (int i = 0; i < 8 && check_nadir({inertia, efr, pfr}, fp) < 0.0; ++i)
    pfr = std::nextafter(pfr, std::numeric_limits<double>::infinity());
  return pfr;
}

bool check_qss(double efr, double pfr, double largest_loss) { return efr + pfr >= largest_loss; }

double response_crossing_time(const ServicePoint& sp, const FrequencyParams& fp) {
  const double loss = fp.largest_loss;
  if (loss <= 0.0) return 0.0;
  // Both ramps active on [0, T_EFR].
  const double rate = sp.efr / fp.t_efr + sp.pfr / fp.t_pfr;
  if (rate * fp.t_efr >= loss) return loss / rate;
  // EFR complete, PFR still ramping on (T_EFR, T_PFR].
  if (sp.efr + sp.pfr >= loss) return (loss - sp.efr) * fp.t_pfr / sp.pfr;
  return std::numeric_limits<double>::infinity();
}

double analytic_nadir(const ServicePoint& sp, const FrequencyParams& fp) {
  const double loss = fp.largest_loss;
  if (loss <= 0.0) return 0.0;
  if (!check_qss(sp.efr, sp.pfr, loss))
    throw NoNadirError("EFR + PFR below the largest loss: frequency does not stabilise");
  if (!(sp.inertia > 0.0)) throw std::invalid_argument("analytic_nadir requires positive inertia");
  const double gain = fp.f0 / (2.0 * sp.inertia);
  const double rate = sp.efr / fp.t_efr + sp.pfr / fp.t_pfr;
  if (rate * fp.t_efr >= loss) {
    // Nadir while both services ramp: the energy deficit is a triangle.
    const double t_star = loss / rate;
    return gain * loss * t_star / 2.0;
  }
  const double uncovered = loss - sp.efr;
  return gain * (sp.efr * fp.t_efr / 2.0 + uncovered * uncovered * fp.t_pfr / (2.0 * sp.pfr));
}

namespace {

struct RampModel {
  double gain;  // f0 / 2H
  double efr, pfr, loss, t_efr, t_pfr;

  [[nodiscard]] double rhs(double t) const {
    double e = t <= t_efr ? efr * t / t_efr : efr;
    double p = t <= t_pfr ? pfr * t / t_pfr : pfr;
    return gain * (e + p - loss);
  }
};

// Calls visit(t, deviation) for every sample, starting at (0, 0).
template <typename Visit>
void integrate(const ServicePoint& sp, const FrequencyParams& fp, double dt, double t_end, Visit&& visit) {
  const RampModel model{fp.f0 / (2.0 * sp.inertia), sp.efr, sp.pfr, fp.largest_loss, fp.t_efr, fp.t_pfr};
  std::vector<double> breaks{fp.t_efr, fp.t_pfr, 60.0};
  const double t_star = response_crossing_time(sp, fp);
  if (std::isfinite(t_star) && t_star > 0.0) breaks.push_back(t_star);
  std::sort(breaks.begin(), breaks.end());

  double t = 0.0;
  double x = 0.0;
  visit(t, x);
  std::size_t next_break = 0;
  long step = 0;
  while (t < t_end) {
    double t_next = std::min(static_cast<double>(step + 1) * dt, t_end);
    while (next_break < breaks.size() && breaks[next_break] <= t) ++next_break;
    bool at_break = false;
    if (next_break < breaks.size() && breaks[next_break] < t_next) {
      t_next = breaks[next_break];
      at_break = true;
    }
    const double h = t_next - t;
    if (h > 0.0) {
      // Classical RK4; the right-hand side depends on time only.
      const double k1 = model.rhs(t);
      const double k2 = model.rhs(t + h / 2.0);
      const double k3 = k2;
      const double k4 = model.rhs(t_next);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = t_next;
    if (!at_break) ++step;
    visit(t, x);
  }
}

void check_sim_args(const ServicePoint& sp, double dt, double t_end) {
  if (!(sp.inertia > 0.0)) throw std::invalid_argument("simulate_post_fault requires positive inertia");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_post_fault requires dt > 0");
  if (!(t_end >= 60.0)) throw std::invalid_argument("simulate_post_fault requires t_end >= 60 s");
}

double simulated_nadir(const ServicePoint& sp, const FrequencyParams& fp, double dt) {
  double worst = 0.0;
  integrate(sp, fp, dt, 60.0, [&](double, double x) { worst = std::max(worst, -x); });
  return worst;
}

}  // namespace

FrequencyTrajectory simulate_post_fault(const ServicePoint& sp, const FrequencyParams& fp, double dt,
                                        double t_end) {
  check_sim_args(sp, dt, t_end);
  FrequencyTrajectory traj;
  const auto expected = static_cast<std::size_t>(t_end / dt) + 8;
  traj.times.reserve(expected);
  traj.deviations.reserve(expected);
  integrate(sp, fp, dt, t_end, [&](double t, double x) {
    traj.times.push_back(t);
    traj.deviations.push_back(x);
    if (-x > traj.nadir_dev) {
      traj.nadir_dev = -x;
      traj.nadir_time = t;
    }
    if (t == 60.0) traj.qss_dev = x;
  });
  traj.initial_rocof = fp.f0 * fp.largest_loss / (2.0 * sp.inertia);
  return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const FrequencyTrajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,delta_f\n";
  out.precision(12);
  for (std::size_t i = 0; i < traj.times.size(); ++i) out << traj.times[i] << ',' << traj.deviations[i] << '\n';
}

namespace kernels {

void batch_nadir_serial(std::span<const ServicePoint> points, const FrequencyParams& fp, double dt,
                        std::span<double> out) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    check_sim_args(points[i], dt, 60.0);
    out[i] = simulated_nadir(points[i], fp, dt);
  }
}

void batch_nadir_omp(std::span<const ServicePoint> points, const FrequencyParams& fp, double dt,
                     std::span<double> out) {
  for (const auto& p : points) check_sim_args(p, dt, 60.0);
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) out[i] = simulated_nadir(points[i], fp, dt);
}

}  // namespace kernels

}  // namespace fsuc
