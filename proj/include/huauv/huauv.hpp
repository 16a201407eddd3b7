#pragma once

#include "huauv/control.hpp"
#include "huauv/dynamics.hpp"
#include "huauv/executor.hpp"
#include "huauv/mission_io.hpp"
#include "huauv/params.hpp"
#include "huauv/planner.hpp"
#include "huauv/reference.hpp"
#include "huauv/scenario.hpp"
#include "huauv/types.hpp"
#include "huauv/world.hpp"
