#pragma once

#include "emt/ahp.hpp"
#include "emt/baseline.hpp"
#include "emt/compare.hpp"
#include "emt/config.hpp"
#include "emt/dp.hpp"
#include "emt/drive_cycle.hpp"
#include "emt/emt_problem.hpp"
#include "emt/errors.hpp"
#include "emt/interp.hpp"
#include "emt/io.hpp"
#include "emt/objectives.hpp"
#include "emt/patterns.hpp"
#include "emt/pipeline.hpp"
#include "emt/powertrain.hpp"
#include "emt/synthetic_maps.hpp"
#include "emt/trajectory.hpp"
