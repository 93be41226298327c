// isolume: command-line front end for the isometric lighting pipeline.
//
//   isolume generate --seed paper-demo --size 8x8 --out map.json
//   isolume render   --seed paper-demo --out frame.png
//   isolume animate  --seed paper-demo --frames 12 --out-dir frames/
//   isolume bench    --scenario scenario.json --out results.csv
//   isolume inspect  obstacles --seed paper-demo --out obstacles.png
//
// Exit codes: 0 success, 2 usage error, 1 runtime error.

#include "isolume/cli_args.hpp"
#include "isolume/isolume.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace isolume;

namespace {

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text))
    throw std::runtime_error("cannot write '" + path.string() + "'");
}

// Options shared by every subcommand that builds a scene.
struct SceneOptions {
  std::string seed = "paper-demo";
  std::string size = "32x12";
  std::string map_path;
  std::string palette_path;
  std::string atlas_path;
  std::string viewport = "1280x720";
  std::string origin = "0,0";
  int face_h = 32;
  int delta_y = 25;
  int noise = 3;
  int margin = kDefaultMargin;
  std::string band_anchor = "first-opaque-row";

  void add_to(CLI::App& app)
  {
    app.add_option("--seed", seed, "Map seed string")->capture_default_str();
    app.add_option("--size", size, "Map size as ROWSxCOLS")->capture_default_str();
    app.add_option("--map", map_path, "Load a SceneMap JSON instead of generating one");
    app.add_option("--palette", palette_path, "Palette JSON weight table");
    app.add_option("--atlas", atlas_path, "Sprite atlas directory (default: $ISOLUME_ATLAS or built-in art)");
    app.add_option("--viewport", viewport, "Viewport as WxH")->capture_default_str();
    app.add_option("--origin", origin, "Map origin in screen pixels as X,Y")->capture_default_str();
    app.add_option("--face-h", face_h, "Vertical step between map rows")->capture_default_str();
    app.add_option("--delta-y", delta_y, "Obstacle band height in rows")->capture_default_str();
    app.add_option("--noise", noise, "Obstacle noise-reduction window")->capture_default_str();
    app.add_option("--margin", margin, "Light texture margin per side")->capture_default_str();
    app.add_option("--band-anchor", band_anchor, "first-opaque-row or sprite-top")->capture_default_str();
  }

  Atlas atlas() const
  {
    std::string dir = atlas_path;
    if (dir.empty())
      if (const char* env = std::getenv("ISOLUME_ATLAS"))
        dir = env;
    return dir.empty() ? default_atlas() : load_atlas(dir);
  }

  SceneMap scene_map() const
  {
    if (!map_path.empty())
      return nlohmann::json::parse(read_file(map_path)).get<SceneMap>();
    const Size rc = parse_size(size);
    const Palette palette = palette_path.empty() ? default_palette() : parse_palette(read_file(palette_path));
    return generate_map(seed, rc.width, rc.height, palette);
  }

  void apply(PipelineConfig& cfg) const
  {
    cfg.viewport = parse_size(viewport);
    cfg.layout.origin = parse_point(origin);
    cfg.layout.face_h = face_h;
    cfg.obstacles.delta_y = delta_y;
    if (band_anchor == "first-opaque-row")
      cfg.obstacles.anchor = BandAnchor::FirstOpaqueRow;
    else if (band_anchor == "sprite-top")
      cfg.obstacles.anchor = BandAnchor::SpriteTop;
    else
      throw UsageError("--band-anchor must be first-opaque-row or sprite-top");
    if (delta_y < 1 || noise < 1 || margin < 0)
      throw UsageError("--delta-y and --noise must be >= 1, --margin >= 0");
    cfg.noise_window = noise;
    cfg.margin = margin;
  }
};

struct LightOptions {
  std::string lights;
  bool no_lights = false;
  bool no_characters = false;
  int skip = 2;
  int interval = 3;
  std::string mode = "light";
  std::string reference = "footprint";
  bool no_correction = false;
  double ambient = 0.4;
  int blur = 2;
  bool dark_outside = false;
  int threads = 1;

  void add_to(CLI::App& app)
  {
    app.add_option("--lights", lights, "Lights as \"x,y[,a,b];...\" in screen pixels (default: two lights)");
    app.add_flag("--no-lights", no_lights, "Render without any light");
    app.add_flag("--no-characters", no_characters, "Do not place a character sprite under each light");
    app.add_option("--skip", skip, "Border-pixel stride for rays")->capture_default_str();
    app.add_option("--interval", interval, "Frames between full retraces")->capture_default_str();
    app.add_option("--mode", mode, "light or shadow")->capture_default_str();
    app.add_option("--reference", reference, "Opacity reference point: footprint or anchor")->capture_default_str();
    app.add_flag("--no-correction", no_correction, "Skip the opacity-map correction");
    app.add_option("--ambient", ambient, "Ambient clarity in [0,1]")->capture_default_str();
    app.add_option("--blur", blur, "Box blur radius")->capture_default_str();
    app.add_flag("--dark-outside", dark_outside, "Unlit pixels go fully dark");
    app.add_option("--threads", threads, "Worker threads (output is identical for any value)")->capture_default_str();
  }

  std::vector<LightSource> parse(Size viewport) const
  {
    if (no_lights)
      return {};
    if (!lights.empty())
      return parse_lights(lights);
    return {{{viewport.width / 3, viewport.height / 2}, 256, 256, true},
            {{2 * viewport.width / 3, viewport.height / 2}, 256, 256, true}};
  }

  void apply(PipelineConfig& cfg) const
  {
    cfg.trace.skip = skip;
    cfg.trace.interval = interval;
    cfg.trace.correction = !no_correction;
    cfg.trace.threads = threads;
    if (mode == "light")
      cfg.trace.mode = TraceMode::Light;
    else if (mode == "shadow")
      cfg.trace.mode = TraceMode::Shadow;
    else
      throw UsageError("--mode must be light or shadow");
    if (reference == "footprint")
      cfg.trace.reference = ReferencePoint::FootprintCenter;
    else if (reference == "anchor")
      cfg.trace.reference = ReferencePoint::Anchor;
    else
      throw UsageError("--reference must be footprint or anchor");
    cfg.shade.ambient_clarity = ambient;
    cfg.shade.blur_radius = blur;
    cfg.shade.dark_outside = dark_outside;
    cfg.shade.threads = threads;
    try {
      cfg.trace.validate();
      cfg.shade.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

struct Prepared {
  Atlas atlas;
  PipelineConfig cfg;
  std::vector<LightSource> lights;
  PreparedScene scene;
};

Prepared prepare(const SceneOptions& so, const LightOptions& lo)
{
  PipelineConfig cfg;
  so.apply(cfg);
  lo.apply(cfg);
  Atlas atlas = so.atlas();
  const SceneMap map = so.scene_map();
  auto lights = lo.parse(cfg.viewport);
  std::vector<Entity> entities;
  if (!lo.no_characters && atlas.contains("character"))
    entities = characters_at(lights, atlas);
  PreparedScene scene = prepare_scene(map, atlas, cfg, entities);
  return {std::move(atlas), cfg, std::move(lights), std::move(scene)};
}

// White where the mask is set, transparent elsewhere.
template <class Mask>
Raster mask_overlay(const Mask& mask, Point offset, Size size)
{
  Raster out(size, Rgba{0, 0, 0, 0});
  for (int y = 0; y < size.height; ++y)
    for (int x = 0; x < size.width; ++x)
      if (mask.contains(x + offset.x, y + offset.y) && mask(x + offset.x, y + offset.y))
        out(x, y) = {255, 255, 255, 255};
  return out;
}

struct OpacityOverlayTag;
using ScreenMask = BitGrid<OpacityOverlayTag>;

ScreenMask overlay_opacity(const Prepared& p)
{
  ScreenMask mask(p.scene.viewport());
  for (const auto& placed : p.scene.composed.draw_list) {
    if (placed.layer == 0)
      continue;
    const OpacityMap& om = p.atlas.at(placed.sprite_id).opacity;
    for (int y = 0; y < om.height(); ++y)
      for (int x = 0; x < om.width(); ++x)
        if (om(x, y))
          mask.set_clipped(placed.position.x + x, placed.position.y + y);
  }
  return mask;
}

Raster inspect_raster(const Prepared& p, const std::string& what)
{
  const Size vp = p.scene.viewport();
  if (what == "obstacles")
    return mask_overlay(p.scene.obstacles, {p.scene.margin, p.scene.margin}, vp);
  if (what == "opacity")
    return mask_overlay(overlay_opacity(p), {0, 0}, vp);
  throw UsageError("unknown inspect target '" + what + "'");
}

int cmd_generate(const std::string& seed, const std::string& size, const std::string& palette_path,
                 const std::string& out)
{
  const Size rc = parse_size(size);
  const Palette palette = palette_path.empty() ? default_palette() : parse_palette(read_file(palette_path));
  const std::string text = nlohmann::json(generate_map(seed, rc.width, rc.height, palette)).dump(1) + "\n";
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

int cmd_render(const SceneOptions& so, const LightOptions& lo, const std::string& inspect, const std::string& out)
{
  const Prepared p = prepare(so, lo);
  Raster frame = render_frame(p.scene, p.atlas, p.lights, p.cfg);
  if (!inspect.empty()) {
    if (inspect == "lighttex")
      throw UsageError("use `inspect lighttex` to dump the raw texture");
    blit_over(frame, inspect_raster(p, inspect), {0, 0});
  }
  write_png(frame, out);
  return 0;
}

int cmd_inspect(const SceneOptions& so, const LightOptions& lo, const std::string& what, const std::string& out)
{
  const Prepared p = prepare(so, lo);
  if (what == "lighttex") {
    LightRenderer renderer(p.scene.viewport(), p.cfg.trace, p.scene.margin);
    const LightTexture& tex = renderer.render(0, p.lights, p.scene.obstacles, p.scene.correction(p.atlas));
    write_gray_png(tex.intensity, out);
    return 0;
  }
  write_png(inspect_raster(p, what), out);
  return 0;
}

int cmd_animate(const SceneOptions& so, const LightOptions& lo, int frames, const std::string& velocity,
                const std::string& camera, const std::string& out_dir)
{
  if (frames < 1)
    throw UsageError("--frames must be at least 1");
  const Point step = parse_point(velocity);
  const Point cam = parse_point(camera);
  const Prepared p = prepare(so, lo);
  fs::create_directories(out_dir);

  LightRenderer renderer(p.scene.viewport(), p.cfg.trace, p.scene.margin);
  std::vector<LightSource> lights = p.lights;
  for (int f = 0; f < frames; ++f) {
    if (f > 0)
      for (auto& l : lights)
        l.center = l.center + step;
    FrameLightStats stats;
    const LightTexture& tex =
        renderer.render(f, lights, p.scene.obstacles, p.scene.correction(p.atlas), f > 0 ? cam : Point{}, &stats);
    const Raster frame = composite_frame(p.scene.composed.raster, tex, p.cfg.shade);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.png", f);
    write_png(frame, fs::path(out_dir) / name);
    std::cout << "frame " << f << (stats.retraced ? " retrace" : " displace") << " rays=" << stats.trace.rays
              << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& scenario_path, const std::string& out, bool append, int frames_override)
{
  BenchScenario s;
  if (!scenario_path.empty())
    s = nlohmann::json::parse(read_file(scenario_path)).get<BenchScenario>();
  if (frames_override > 0)
    s.frames = frames_override;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const BenchReport r = run_benchmark(s);
  std::cout << csv_header() << "\n" << csv_row(r) << "\n";
  std::cerr << "mean frame " << r.total.mean_us / 1000.0 << " ms, " << r.fps << " fps (" << r.environment << ")\n";
  if (!out.empty())
    write_csv(r, out, append);
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"isolume - 2.5D lighting for procedurally generated isometric maps"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a SceneMap JSON from a seed");
  std::string g_seed, g_size = "8x8", g_palette, g_out;
  gen->add_option("--seed", g_seed, "Map seed string")->required();
  gen->add_option("--size", g_size, "Map size as ROWSxCOLS")->capture_default_str();
  gen->add_option("--palette", g_palette, "Palette JSON weight table");
  gen->add_option("--out", g_out, "Output file (default: stdout)");

  // render
  auto* render = app.add_subcommand("render", "Render one lit frame to PNG");
  SceneOptions r_scene;
  LightOptions r_light;
  std::string r_inspect, r_out = "frame.png";
  r_scene.add_to(*render);
  r_light.add_to(*render);
  render->add_option("--inspect", r_inspect, "Overlay obstacles or opacity masks in white");
  render->add_option("--out", r_out, "Output PNG")->capture_default_str();

  // animate
  auto* anim = app.add_subcommand("animate", "Render a numbered frame sequence with a moving light");
  SceneOptions a_scene;
  LightOptions a_light;
  int a_frames = 12;
  std::string a_velocity = "4,0", a_camera = "0,0", a_out = "frames";
  a_scene.add_to(*anim);
  a_light.add_to(*anim);
  anim->add_option("--frames", a_frames, "Number of frames")->capture_default_str();
  anim->add_option("--light-velocity", a_velocity, "Per-frame light movement as DX,DY")->capture_default_str();
  anim->add_option("--camera", a_camera, "Per-frame camera movement as DX,DY")->capture_default_str();
  anim->add_option("--out-dir", a_out, "Output directory")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run the headless frame-time benchmark");
  std::string b_scenario, b_out;
  bool b_append = false;
  int b_frames = 0;
  bench->add_option("--scenario", b_scenario, "Scenario JSON (default: built-in 1280x720, 2 lights)");
  bench->add_option("--out", b_out, "CSV output path");
  bench->add_flag("--append", b_append, "Append to an existing CSV without repeating the header");
  bench->add_option("--frames", b_frames, "Override the scenario frame count");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Dump intermediate buffers as PNG");
  SceneOptions i_scene;
  LightOptions i_light;
  std::string i_what, i_out = "inspect.png";
  inspect->add_option("what", i_what, "obstacles | lighttex | opacity")
      ->required()
      ->check(CLI::IsMember({"obstacles", "lighttex", "opacity"}));
  i_scene.add_to(*inspect);
  i_light.add_to(*inspect);
  inspect->add_option("--out", i_out, "Output PNG")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen)
      return cmd_generate(g_seed, g_size, g_palette, g_out);
    if (*render)
      return cmd_render(r_scene, r_light, r_inspect, r_out);
    if (*anim)
      return cmd_animate(a_scene, a_light, a_frames, a_velocity, a_camera, a_out);
    if (*bench)
      return cmd_bench(b_scenario, b_out, b_append, b_frames);
    if (*inspect)
      return cmd_inspect(i_scene, i_light, i_what, i_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
