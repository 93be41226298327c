#pragma once

// End-to-end wiring shared by the CLI and the benchmark: map -> composed
// scene -> obstacle map, then per frame light texture -> shaded raster.

#include "isolume/assets.hpp"
#include "isolume/lighting.hpp"
#include "isolume/occlusion.hpp"
#include "isolume/procgen.hpp"
#include "isolume/scene.hpp"
#include "isolume/shading.hpp"

#include <string>
#include <vector>

namespace isolume {

struct PipelineConfig {
  IsoLayout layout{};
  Size viewport{1280, 720};
  int margin = kDefaultMargin;
  ObstacleOptions obstacles{};
  int noise_window = 3;
  TraceConfig trace{};
  ShadeParams shade{};
};

struct Entity {
  std::string sprite_id;
  Point position;
};

// Everything that is rebuilt only when a new map is loaded.
struct PreparedScene {
  ComposedScene composed;
  ObstacleMap obstacles;
  int margin = kDefaultMargin;

  Size viewport() const { return composed.raster.size(); }
  Size texture_size() const { return {viewport().width + 2 * margin, viewport().height + 2 * margin}; }
  CorrectionScene correction(const Atlas& atlas) const { return {&composed.draw_list, &atlas}; }
};

inline PreparedScene prepare_scene(const SceneMap& map, const Atlas& atlas, const PipelineConfig& cfg,
                                   const std::vector<Entity>& entities = {})
{
  ComposeOptions copts;
  copts.viewport = cfg.viewport;
  ComposedScene composed = compose_scene(map, atlas, cfg.layout, copts);
  for (const auto& e : entities)
    add_entity(composed, atlas, e.sprite_id, e.position);

  const Size vp = composed.raster.size();
  ObstacleOptions oopts = cfg.obstacles;
  oopts.offset = {cfg.margin, cfg.margin};
  ObstacleMap raw =
      build_obstacle_map(composed.draw_list, atlas, {vp.width + 2 * cfg.margin, vp.height + 2 * cfg.margin}, oopts);
  return {std::move(composed), reduce_noise(raw, cfg.noise_window), cfg.margin};
}

// Places one light-carrying character per light so the light sits at the
// character's feet.
inline std::vector<Entity> characters_at(const std::vector<LightSource>& lights, const Atlas& atlas,
                                         const std::string& id = "character")
{
  std::vector<Entity> out;
  const AtlasEntry& entry = atlas.at(id);
  const auto rows = detail::opaque_rows(entry.opacity);
  const int feet = rows ? rows->second : entry.sprite.image.height() - 1;
  const int half_w = entry.sprite.image.width() / 2;
  for (const auto& l : lights)
    out.push_back({id, {l.center.x - half_w, l.center.y - feet}});
  return out;
}

// One-shot render of a single frame (always a retrace).
inline Raster render_frame(const PreparedScene& scene, const Atlas& atlas, const std::vector<LightSource>& lights,
                           const PipelineConfig& cfg)
{
  LightRenderer renderer(scene.viewport(), cfg.trace, scene.margin);
  const LightTexture& tex = renderer.render(0, lights, scene.obstacles, scene.correction(atlas));
  return composite_frame(scene.composed.raster, tex, cfg.shade);
}

}  // namespace isolume
