#pragma once

// Umbrella header for the full mission-operations toolkit.

#include "starsim/constants.hpp"
#include "starsim/energy.hpp"
#include "starsim/error.hpp"
#include "starsim/link.hpp"
#include "starsim/orbit.hpp"
#include "starsim/payload.hpp"
#include "starsim/planner.hpp"
#include "starsim/report_io.hpp"
#include "starsim/scenario.hpp"
#include "starsim/scenario_io.hpp"
#include "starsim/schedule.hpp"
#include "starsim/schedule_io.hpp"
#include "starsim/sim.hpp"
