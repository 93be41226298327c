#include "isolume/bench.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace isolume;
namespace fs = std::filesystem;

namespace {

BenchScenario small_scenario()
{
  BenchScenario s;
  s.rows = 10;
  s.cols = 4;
  s.viewport = {320, 240};
  s.a = s.b = 64;
  s.frames = 9;
  s.warmup_frames = 1;
  return s;
}

std::vector<std::string> lines(const fs::path& p)
{
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);)
    out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');)
    out.push_back(f);
  return out;
}

}  // namespace

TEST(Summarize, MeanMedianNearestRankP95)
{
  std::vector<double> v;
  for (int i = 1; i <= 20; ++i)
    v.push_back(i);
  const PhaseStats s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean_us, 10.5);
  EXPECT_DOUBLE_EQ(s.median_us, 10.5);
  EXPECT_DOUBLE_EQ(s.p95_us, 19);
  EXPECT_DOUBLE_EQ(summarize({7}).p95_us, 7);
  EXPECT_DOUBLE_EQ(summarize({}).mean_us, 0);
}

TEST(OrbitLights, DeterministicAndOnCircle)
{
  BenchScenario s = small_scenario();
  s.light_count = 3;
  const auto a = orbit_lights(s, 17), b = orbit_lights(s, 17);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 3u);
  for (const auto& l : a) {
    const double d = std::hypot(l.center.x - 160.0, l.center.y - 120.0);
    EXPECT_NEAR(d, 60.0, 1.0);
  }
  EXPECT_EQ(orbit_lights(s, 0)[0].center, (Point{220, 120}));
}

TEST(RunBenchmark, ZeroLightsWellFormed)
{
  BenchScenario s = small_scenario();
  s.light_count = 0;
  const BenchReport r = run_benchmark(s);
  EXPECT_EQ(r.work.rays, 0);
  EXPECT_EQ(r.work.pixel_writes, 0);
  EXPECT_EQ(r.work.fragments_shaded, 9L * 320 * 240);
  EXPECT_GT(r.fps, 0);
  EXPECT_GE(r.total.p95_us, r.total.median_us);
}

TEST(RunBenchmark, WorkCountsDeterministicAndCadenced)
{
  const BenchScenario s = small_scenario();
  const BenchReport a = run_benchmark(s), b = run_benchmark(s);
  EXPECT_EQ(a.work, b.work);
  // Frames 1..9 after one warmup frame: retraces at 3, 6, 9.
  EXPECT_EQ(a.work.retraces, 3);
  EXPECT_EQ(a.work.displacements, 6);
  // 2 lights x (4 + 4 * ceil(127 / 2)) rays per retrace.
  EXPECT_EQ(a.work.rays, 3L * 2 * (4 + 4 * 64));
}

TEST(RunBenchmark, RaysLinearInLightCount)
{
  BenchScenario s = small_scenario();
  s.light_count = 1;
  const long one = run_benchmark(s).work.rays;
  s.light_count = 4;
  EXPECT_EQ(run_benchmark(s).work.rays, 4 * one);
}

TEST(RunBenchmark, RejectsBadScenario)
{
  BenchScenario s = small_scenario();
  s.frames = 0;
  EXPECT_THROW(run_benchmark(s), std::invalid_argument);
}

TEST(ScenarioJson, MissingKeysKeepDefaults)
{
  const BenchScenario s = nlohmann::json::parse(R"({"light_count": 5, "viewport": [640, 480]})").get<BenchScenario>();
  EXPECT_EQ(s.light_count, 5);
  EXPECT_EQ(s.viewport, (Size{640, 480}));
  EXPECT_EQ(s.seed, "paper-demo");
  EXPECT_EQ(s.frames, 300);
  const BenchScenario back = nlohmann::json(s).get<BenchScenario>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(s));
}

TEST(Csv, HeaderRowAndAppend)
{
  const fs::path dir = fs::path(ISOLUME_TEST_TMP) / "bench";
  fs::create_directories(dir);
  const fs::path path = dir / "bench.csv";
  const BenchReport r = run_benchmark(small_scenario());

  write_csv(r, path);
  auto content = lines(path);
  ASSERT_EQ(content.size(), 2u);
  EXPECT_EQ(content[0], csv_header());
  const auto head = fields(content[0]), row = fields(content[1]);
  ASSERT_EQ(head.size(), row.size());
  EXPECT_EQ(head.back(), "fps");
  EXPECT_NEAR(std::stod(row.back()), r.fps, 0.001);

  write_csv(r, path, true);
  content = lines(path);
  ASSERT_EQ(content.size(), 3u);
  EXPECT_EQ(content[2], content[1]);

  write_csv(r, path);
  EXPECT_EQ(lines(path).size(), 2u);
}
