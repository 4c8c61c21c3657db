#pragma once

#include <cstdint>
#include <vector>

#include "mograsp/contact.hpp"
#include "mograsp/grasp.hpp"

namespace mograsp {

enum class ObjectFate {
  retained,
  never_contacted,
  squeezed_out,
  jaw_collision,
};

const char* to_string(ObjectFate fate);

struct SimOutcome {
  std::vector<int> retained;  // sorted scene indices
  int n_g = 0;
  double final_width = 0.0;
  std::vector<ObjectFate> per_object;
  Scene post_scene;  // object poses after the attempt (retained entries
                     // are left at their pre-grasp pose; callers remove them)
};

struct SimParams {
  double tau_contain = 0.35;     // min clip-area / object-area to hold on
  double colinearity_tol = 0.1;  // rad, mutual tolerance of chain lines
  int support_ns = 25;           // dense boundary sampling for supports
  int fit_ns = 5;                // sampling for the stable-width fit rule
  double settle_band = 4.0;      // mm; objects settle this far while closing
};

/// Quasi-static grasp outcome. Deterministic for a given exec_noise.seed;
/// rules are applied in a fixed order:
///   1. the executed action is the planned one perturbed by control noise;
///   2. objects overlapping a jaw footprint are bumped aside (jaw_collision);
///   3. objects with no overlap with the interior region never make contact;
///   4. the rest form a squeeze chain ordered along the closing axis, with
///      per-object support pairs from dense boundary samples inside the
///      region (overlapping chain slots keep only the widest object);
///   5. an object is held iff its support pair is a friction equilibrium,
///      its containment ratio reaches tau_contain, some stable pair fits
///      within its squeezed extent, and the chain's connecting lines are
///      mutually colinear within tolerance (longest such run wins);
///   6. the final width is the sum of the retained support diameters
///      (objects are shed from the far end if the sum cannot fit).
SimOutcome simulate_grasp(const Scene& scene, const GraspAction& action,
                          const GripperSpec& spec,
                          const FrictionModel& friction,
                          const NoiseModel& exec_noise,
                          const SimParams& params = SimParams{});

struct SceneSpec {
  std::uint64_t seed = 0;
  int object_count = 75;
  int min_vertices = 3;
  int max_vertices = 8;
  double min_size = 25.0;   // mm, polygon circumdiameter lower bound
  double max_size = 55.0;   // mm, upper bound
  double region_width = 600.0;
  double region_height = 600.0;
  double clustering = 0.7;  // [0,1], bias toward existing objects
  double margin = 1.0;      // mm, minimum pairwise separation
};

/// Rejection-sampled non-overlapping scene; reproducible bit-for-bit for
/// a fixed seed. Throws PlacementFailure after 1e4 attempts per object.
Scene generate_scene(const SceneSpec& spec);

}  // namespace mograsp
