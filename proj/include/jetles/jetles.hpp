#pragma once

#include "jetles/bench.hpp"
#include "jetles/block_array.hpp"
#include "jetles/boundary.hpp"
#include "jetles/comm.hpp"
#include "jetles/diagnostics.hpp"
#include "jetles/error.hpp"
#include "jetles/exchange.hpp"
#include "jetles/flow_config.hpp"
#include "jetles/grid.hpp"
#include "jetles/io.hpp"
#include "jetles/numerics.hpp"
#include "jetles/partition.hpp"
#include "jetles/physics.hpp"
#include "jetles/preprocess.hpp"
#include "jetles/solver.hpp"
