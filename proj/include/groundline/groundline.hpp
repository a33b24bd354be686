#pragma once

#include "groundline/errors.hpp"
#include "groundline/estimator.hpp"
#include "groundline/filter.hpp"
#include "groundline/geom.hpp"
#include "groundline/groundtruth.hpp"
#include "groundline/io.hpp"
#include "groundline/log.hpp"
#include "groundline/metrics.hpp"
#include "groundline/projective.hpp"
#include "groundline/raster.hpp"
#include "groundline/sim.hpp"
