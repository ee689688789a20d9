#pragma once

#include "maskrefine/error.hpp"
#include "maskrefine/fusion.hpp"
#include "maskrefine/io.hpp"
#include "maskrefine/labeling.hpp"
#include "maskrefine/metrics.hpp"
#include "maskrefine/mixing.hpp"
#include "maskrefine/pipeline.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"
#include "maskrefine/render.hpp"
#include "maskrefine/stats.hpp"
#include "maskrefine/synthetic.hpp"
