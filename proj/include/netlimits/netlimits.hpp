#pragma once

#include "netlimits/cap_simplex.hpp"
#include "netlimits/core.hpp"
#include "netlimits/enumeration.hpp"
#include "netlimits/info_metrics.hpp"
#include "netlimits/model_spec.hpp"
#include "netlimits/moments.hpp"
#include "netlimits/recovery.hpp"
#include "netlimits/rng.hpp"
#include "netlimits/samplers.hpp"
#include "netlimits/serialize.hpp"
#include "netlimits/sweep.hpp"
#include "netlimits/thresholds.hpp"
