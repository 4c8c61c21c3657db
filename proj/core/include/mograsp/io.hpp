#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mograsp/declutter.hpp"
#include "mograsp/mognet.hpp"

namespace mograsp {

inline constexpr const char* kSceneSchema = "mograsp-scene/1";
inline constexpr const char* kModelSchema = "mograsp-model/1";
inline constexpr const char* kEpisodeSchema = "mograsp-episode/1";
inline constexpr const char* kBenchSchema = "mograsp-bench/1";

/// Writes via a temp file in the same directory plus rename.
void atomic_write(const std::string& path, const std::string& content);

struct SceneFile {
  std::uint64_t seed = 0;
  Scene objects;
  std::map<std::string, std::string> config;  // effective-config echo
};

void save_scene(const std::string& path, const SceneFile& file);
/// Validates the schema tag and every object's invariants (3..8 vertices,
/// strict convexity, area >= 1 mm^2); offending scenes are rejected here
/// rather than repaired.
SceneFile load_scene(const std::string& path);

void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

struct ModelFile {
  MogNetEnsemble ensemble;
  std::map<std::string, std::string> config;
  std::vector<TrainReport> reports;
};

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

void save_episode_log(const std::string& path, const EpisodeLog& log,
                      const std::map<std::string, std::string>& config);
EpisodeLog load_episode_log(const std::string& path);

struct BenchRow {
  std::string method;
  std::uint64_t seed = 0;
  Metrics metrics;
};

std::string metrics_csv(const std::vector<BenchRow>& rows,
                        const std::map<std::string, std::string>& config);

}  // namespace mograsp
