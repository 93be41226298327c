#pragma once

#include "isolume/assets.hpp"
#include "isolume/bench.hpp"
#include "isolume/grid.hpp"
#include "isolume/lighting.hpp"
#include "isolume/occlusion.hpp"
#include "isolume/pipeline.hpp"
#include "isolume/png_io.hpp"
#include "isolume/procgen.hpp"
#include "isolume/scene.hpp"
#include "isolume/shading.hpp"
