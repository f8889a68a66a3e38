#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsuc/scenario.hpp"
#include "fsuc/system_model.hpp"

namespace fsuc {

// Security rules a committed schedule must meet.
struct SecurityRules {
  bool frequency = false;               // RoCoF, nadir and q-s-s at decoded values
  std::optional<double> pfr_volume;     // MW, every hour
  std::optional<double> efr_volume;     // MW, every hour (exact)
  std::optional<double> inertia_floor;  // MW*s, every hour
};

// Replays a committed schedule against the model's rules and the actual
// series. Returns one message per violation; empty means clean. `tol` is
// relative to the magnitude of each checked quantity (floor 1).
std::vector<std::string> check_schedule(const SystemModel& model, const Schedule& schedule,
                                        const SecurityRules& rules = {}, double tol = 1e-5);

}  // namespace fsuc
