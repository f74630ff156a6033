#pragma once

#include "scn2d/configurator.hpp"
#include "scn2d/data.hpp"
#include "scn2d/error.hpp"
#include "scn2d/gen_analysis.hpp"
#include "scn2d/least_squares.hpp"
#include "scn2d/matrix.hpp"
#include "scn2d/model.hpp"
#include "scn2d/model_io.hpp"
#include "scn2d/random.hpp"
#include "scn2d/rvfl.hpp"
#include "scn2d/weight_stats.hpp"
