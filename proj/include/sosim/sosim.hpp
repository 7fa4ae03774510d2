#pragma once

#include "sosim/geometry.hpp"
#include "sosim/rng.hpp"
#include "sosim/pointproc.hpp"
#include "sosim/sensor.hpp"
#include "sosim/stats.hpp"
#include "sosim/format.hpp"
#include "sosim/traversal.hpp"
#include "sosim/montecarlo.hpp"
#include "sosim/ordering.hpp"
#include "sosim/io.hpp"
#include "sosim/config.hpp"
#include "sosim/cli.hpp"
