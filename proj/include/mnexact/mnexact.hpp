#pragma once

#include "mnexact/asymptotics.hpp"
#include "mnexact/calibration_simplex.hpp"
#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/exact_test.hpp"
#include "mnexact/lattice.hpp"
#include "mnexact/montecarlo.hpp"
#include "mnexact/numeric.hpp"
#include "mnexact/parse.hpp"
#include "mnexact/randomized_power.hpp"
#include "mnexact/simstudy.hpp"
#include "mnexact/statistics.hpp"
#include "mnexact/version.hpp"
