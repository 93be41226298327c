#pragma once

// Headless frame-time harness. Times each pipeline phase per frame and
// counts the work done, so runs can be compared for determinism (counts)
// and speed (timings).

#include "isolume/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace isolume {

struct BenchScenario {
  std::string seed = "paper-demo";
  int rows = 32;
  int cols = 12;
  Size viewport{1280, 720};
  int light_count = 2;
  int a = 256;
  int b = 256;
  int skip = 2;
  int interval = 3;
  int blur_radius = 2;
  double ambient_clarity = 0.4;
  int frames = 300;
  int warmup_frames = 10;
  int threads = 1;

  void validate() const
  {
    if (frames < 1)
      throw std::invalid_argument("frames must be at least 1");
    if (warmup_frames < 0)
      throw std::invalid_argument("warmup_frames must be non-negative");
    if (light_count < 0)
      throw std::invalid_argument("light_count must be non-negative");
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("map size must be at least 1x1");
  }
};

inline void to_json(nlohmann::json& j, const BenchScenario& s)
{
  j = {{"seed", s.seed},
       {"rows", s.rows},
       {"cols", s.cols},
       {"viewport", {s.viewport.width, s.viewport.height}},
       {"light_count", s.light_count},
       {"a", s.a},
       {"b", s.b},
       {"skip", s.skip},
       {"interval", s.interval},
       {"blur_radius", s.blur_radius},
       {"ambient_clarity", s.ambient_clarity},
       {"frames", s.frames},
       {"warmup_frames", s.warmup_frames},
       {"threads", s.threads}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, BenchScenario& s)
{
  s.seed = j.value("seed", s.seed);
  s.rows = j.value("rows", s.rows);
  s.cols = j.value("cols", s.cols);
  if (j.contains("viewport")) {
    const auto& v = j.at("viewport");
    s.viewport = {v.at(0).get<int>(), v.at(1).get<int>()};
  }
  s.light_count = j.value("light_count", s.light_count);
  s.a = j.value("a", s.a);
  s.b = j.value("b", s.b);
  s.skip = j.value("skip", s.skip);
  s.interval = j.value("interval", s.interval);
  s.blur_radius = j.value("blur_radius", s.blur_radius);
  s.ambient_clarity = j.value("ambient_clarity", s.ambient_clarity);
  s.frames = j.value("frames", s.frames);
  s.warmup_frames = j.value("warmup_frames", s.warmup_frames);
  s.threads = j.value("threads", s.threads);
}

struct PhaseStats {
  double mean_us = 0;
  double median_us = 0;
  double p95_us = 0;
};

inline PhaseStats summarize(std::vector<double> samples)
{
  if (samples.empty())
    return {};
  PhaseStats s;
  double sum = 0;
  for (double v : samples)
    sum += v;
  s.mean_us = sum / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  s.median_us = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95_us = samples[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

struct WorkCounts {
  long rays = 0;
  long pixel_writes = 0;
  long fragments_shaded = 0;
  long retraces = 0;
  long displacements = 0;

  friend bool operator==(const WorkCounts&, const WorkCounts&) = default;
};

struct BenchReport {
  BenchScenario scenario;
  PhaseStats trace, correction, blur, shade, total;
  // Wall time of the light phase split by frame kind.
  double retrace_light_mean_us = 0;
  double displace_light_mean_us = 0;
  double fps = 0;
  WorkCounts work;
  std::string environment;
};

// Deterministic orbit: light i sits at angle (frame + 360 i / n) degrees on
// a circle of radius min(w, h) / 4 around the viewport centre.
inline std::vector<LightSource> orbit_lights(const BenchScenario& s, long frame)
{
  std::vector<LightSource> out;
  const double cx = s.viewport.width / 2.0, cy = s.viewport.height / 2.0;
  const double radius = std::min(s.viewport.width, s.viewport.height) / 4.0;
  for (int i = 0; i < s.light_count; ++i) {
    const double deg = static_cast<double>(frame) + 360.0 * i / s.light_count;
    const double rad = deg * std::numbers::pi / 180.0;
    out.push_back({{static_cast<int>(std::lround(cx + radius * std::cos(rad))),
                    static_cast<int>(std::lround(cy + radius * std::sin(rad)))},
                   s.a,
                   s.b,
                   true});
  }
  return out;
}

inline PipelineConfig pipeline_config(const BenchScenario& s)
{
  PipelineConfig cfg;
  cfg.viewport = s.viewport;
  cfg.trace.skip = s.skip;
  cfg.trace.interval = s.interval;
  cfg.trace.threads = s.threads;
  cfg.shade.blur_radius = s.blur_radius;
  cfg.shade.ambient_clarity = s.ambient_clarity;
  cfg.shade.threads = s.threads;
  return cfg;
}

inline BenchReport run_benchmark(const BenchScenario& s, const Atlas& atlas = default_atlas(),
                                 const Palette& palette = default_palette())
{
  s.validate();
  using clock = std::chrono::steady_clock;
  auto micros = [](clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); };

  const PipelineConfig cfg = pipeline_config(s);
  const SceneMap map = generate_map(s.seed, s.rows, s.cols, palette);
  const PreparedScene scene = prepare_scene(map, atlas, cfg);
  LightRenderer renderer(scene.viewport(), cfg.trace, scene.margin);

  std::vector<double> trace_us, correction_us, blur_us, shade_us, total_us, retrace_light, displace_light;
  BenchReport report;
  report.scenario = s;

  const long total_frames = static_cast<long>(s.warmup_frames) + s.frames;
  auto previous = orbit_lights(s, 0);
  for (long f = 0; f < total_frames; ++f) {
    const auto lights = orbit_lights(s, f);
    const Point camera = lights.empty() ? Point{} : lights.front().center - previous.front().center;
    previous = lights;

    const auto t0 = clock::now();
    FrameLightStats ls;
    const LightTexture& tex = renderer.render(f, lights, scene.obstacles, scene.correction(atlas), camera, &ls);
    const auto t1 = clock::now();
    const LightTexture blurred = box_blur(tex, cfg.shade.blur_radius);
    const auto t2 = clock::now();
    const Raster frame = shade_frame(scene.composed.raster, blurred, cfg.shade);
    const auto t3 = clock::now();

    if (f < s.warmup_frames)
      continue;
    const double light_us = micros(t1 - t0);
    trace_us.push_back(ls.retraced ? ls.trace_us : light_us);
    correction_us.push_back(ls.correction_us);
    blur_us.push_back(micros(t2 - t1));
    shade_us.push_back(micros(t3 - t2));
    total_us.push_back(micros(t3 - t0));
    (ls.retraced ? retrace_light : displace_light).push_back(light_us);

    report.work.rays += ls.trace.rays;
    report.work.pixel_writes += ls.trace.pixel_writes;
    report.work.fragments_shaded += static_cast<long>(frame.width()) * frame.height();
    ++(ls.retraced ? report.work.retraces : report.work.displacements);
  }

  report.trace = summarize(trace_us);
  report.correction = summarize(correction_us);
  report.blur = summarize(blur_us);
  report.shade = summarize(shade_us);
  report.total = summarize(total_us);
  report.retrace_light_mean_us = summarize(retrace_light).mean_us;
  report.displace_light_mean_us = summarize(displace_light).mean_us;
  report.fps = report.total.mean_us > 0 ? 1e6 / report.total.mean_us : 0.0;
  report.environment = "threads=" + std::to_string(s.threads) +
                       " hw_concurrency=" + std::to_string(std::thread::hardware_concurrency());
  return report;
}

inline std::string csv_header()
{
  return "seed,rows,cols,viewport_w,viewport_h,light_count,a,b,skip,interval,blur_radius,frames,warmup_frames,"
         "trace_mean_us,correction_mean_us,blur_mean_us,shade_mean_us,total_mean_us,"
         "trace_p95_us,correction_p95_us,blur_p95_us,shade_p95_us,total_p95_us,"
         "total_median_us,retrace_light_mean_us,displace_light_mean_us,"
         "rays,pixel_writes,fragments_shaded,fps";
}

inline std::string csv_row(const BenchReport& r)
{
  const auto& s = r.scenario;
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  std::string seed = s.seed;
  if (seed.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : seed)
      quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    seed = quoted + "\"";
  }
  std::string row = seed;
  for (int v : {s.rows, s.cols, s.viewport.width, s.viewport.height, s.light_count, s.a, s.b, s.skip, s.interval,
                s.blur_radius, s.frames, s.warmup_frames})
    row += "," + std::to_string(v);
  for (const PhaseStats* p : {&r.trace, &r.correction, &r.blur, &r.shade, &r.total})
    row += "," + num(p->mean_us);
  for (const PhaseStats* p : {&r.trace, &r.correction, &r.blur, &r.shade, &r.total})
    row += "," + num(p->p95_us);
  row += "," + num(r.total.median_us) + "," + num(r.retrace_light_mean_us) + "," + num(r.displace_light_mean_us);
  row += "," + std::to_string(r.work.rays) + "," + std::to_string(r.work.pixel_writes) + "," +
         std::to_string(r.work.fragments_shaded);
  row += "," + num(r.fps);
  return row;
}

// Writes a header plus one row. In append mode an existing non-empty file
// only gains the row.
inline void write_csv(const BenchReport& r, const std::filesystem::path& path, bool append = false)
{
  const bool has_content = append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (!has_content)
    out << csv_header() << '\n';
  out << csv_row(r) << '\n';
  if (!out)
    throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace isolume
