// idla.hpp: umbrella header.
#pragma once

#include "idla/block.hpp"
#include "idla/bounds.hpp"
#include "idla/graph.hpp"
#include "idla/harness.hpp"
#include "idla/process.hpp"
#include "idla/rng.hpp"
#include "idla/serialize.hpp"
#include "idla/stats.hpp"
#include "idla/types.hpp"
#include "idla/walkstats.hpp"
