#pragma once

// Umbrella header for the whole library.

#include "drugsim/battery.hpp"
#include "drugsim/baselines.hpp"
#include "drugsim/config.hpp"
#include "drugsim/drug.hpp"
#include "drugsim/energy.hpp"
#include "drugsim/engine.hpp"
#include "drugsim/metrics.hpp"
#include "drugsim/plot.hpp"
#include "drugsim/protocol.hpp"
#include "drugsim/rng.hpp"
#include "drugsim/topology.hpp"
