#pragma once

// Umbrella header: the whole library.

#include "fixiter/analysis.hpp"
#include "fixiter/bounds.hpp"
#include "fixiter/config.hpp"
#include "fixiter/experiment.hpp"
#include "fixiter/fixed_point_set.hpp"
#include "fixiter/linalg.hpp"
#include "fixiter/mapping.hpp"
#include "fixiter/point.hpp"
#include "fixiter/problems.hpp"
#include "fixiter/random.hpp"
#include "fixiter/schedule.hpp"
#include "fixiter/schemes.hpp"
#include "fixiter/trace.hpp"
