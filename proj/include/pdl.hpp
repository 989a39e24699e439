#pragma once

#include "pdl/geometry.hpp"
#include "pdl/state.hpp"
#include "pdl/race.hpp"
#include "pdl/regions.hpp"
#include "pdl/assignment.hpp"
#include "pdl/simulation.hpp"
#include "pdl/scenario.hpp"
#include "pdl/experiments.hpp"
#include "pdl/io.hpp"
