#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mograsp/contact.hpp"
#include "mograsp/geometry.hpp"

namespace mograsp {

using Scene = std::vector<ConvexPolygon>;

struct GripperSpec {
  double max_width = 85.0;     // jaw opening w_g(0), mm
  double jaw_length = 44.0;    // footprint along the jaw face, mm
  double jaw_thickness = 6.0;  // mm
  double max_force = 235.0;    // N, metadata only
};

struct GraspAction {
  Pose2 pose;
};

struct NoiseModel {
  double sigma_u_x = 2.0;                    // mm
  double sigma_u_y = 2.0;                    // mm
  double sigma_u_theta = 2.0 * M_PI / 180.0; // rad
  double sigma_x = 2.0;                      // mm, per-object translation
  int n_mc = 30;
  std::uint64_t seed = 0;

  static NoiseModel zero(std::uint64_t seed = 0) {
    return NoiseModel{0.0, 0.0, 0.0, 0.0, 1, seed};
  }
};

struct ObjectGroup {
  std::vector<int> members;  // sorted, distinct scene indices

  int size() const { return static_cast<int>(members.size()); }
};

struct CandidateEval {
  GraspAction action;
  double gamma = 0.0;
  double n_g_pred = 0.0;
  double score = 0.0;  // gamma * n_g_pred
};

/// Grasp-count (or heuristic) prediction for a candidate action.
using Predictor = std::function<double(const Scene&, const ObjectGroup&,
                                       const GraspAction&)>;

/// Rectangle between the jaws at the given opening. The closing axis is
/// (cos theta_g, sin theta_g); the jaw faces run perpendicular to it.
OrientedRect gripper_interior(const GraspAction& action,
                              const GripperSpec& spec, double width);

/// The two jaw footprints at the maximum opening.
std::pair<OrientedRect, OrientedRect> jaw_footprints(const GraspAction& action,
                                                     const GripperSpec& spec);

/// Cover points of the group hull x n_theta orientations in [0, pi),
/// keeping only actions whose jaw footprints overlap no scene object.
std::vector<GraspAction> gen_grasp_cands(const Scene& scene,
                                         const ObjectGroup& group,
                                         const GripperSpec& spec, int n_p,
                                         int n_theta);

/// Intersection-area condition (every member clip has positive area) and
/// the grasp-diameter condition h_0 >= h*_f.
bool check_necessary_conditions(const Scene& scene, const ObjectGroup& group,
                                const GraspAction& action,
                                const GripperSpec& spec,
                                const FrictionModel& friction, int n_s);

/// Sum of member clip areas against the interior rectangle at max width.
double total_intersection_area(const Scene& scene, const ObjectGroup& group,
                               const GraspAction& action,
                               const GripperSpec& spec);

/// Fraction of noise-perturbed instances that satisfy the necessary
/// conditions; deterministic for a given noise.seed.
double necessary_conds_proba(const Scene& scene, const ObjectGroup& group,
                             const GraspAction& action,
                             const GripperSpec& spec,
                             const FrictionModel& friction,
                             const NoiseModel& noise, int n_s = 5);

struct PlanResult {
  std::vector<CandidateEval> evals;  // one per candidate, candidate order
  int best_index = -1;               // -1 when no candidate scored > 0
};

/// Evaluates gamma * prediction over all candidates; per-candidate RNG
/// streams are split from noise.seed by candidate index, so results are
/// identical for serial and parallel evaluation.
PlanResult plan_grasp_detailed(const Scene& scene, const ObjectGroup& group,
                               const GripperSpec& spec,
                               const FrictionModel& friction,
                               const NoiseModel& noise,
                               const Predictor& predictor, int n_p,
                               int n_theta, int n_s, int jobs = 1);

/// Argmax of gamma * N_g with lowest-index tie-breaking; none when no
/// candidate exists or the best score is zero.
std::optional<std::pair<GraspAction, double>> robust_grasp_planner(
    const Scene& scene, const ObjectGroup& group, const GripperSpec& spec,
    const FrictionModel& friction, const NoiseModel& noise,
    const Predictor& predictor, int n_p, int n_theta, int n_s, int jobs = 1);

namespace detail {

/// Per-scene cache of min stable diameters (translation-invariant, so
/// perturbed instances reuse the nominal values).
class MinDiameterCache {
public:
  MinDiameterCache(const Scene& scene, const FrictionModel& friction, int n_s);
  double object_diameter(int index) const;
  double group_sum(const ObjectGroup& group) const;

private:
  std::vector<double> diameters_;
};

bool conditions_hold(const std::vector<ConvexPolygon>& members,
                     const OrientedRect& interior, double h_star);

}  // namespace detail

}  // namespace mograsp
