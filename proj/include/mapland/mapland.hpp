#pragma once

#include "mapland/analysis.hpp"
#include "mapland/cost_array.hpp"
#include "mapland/error.hpp"
#include "mapland/graph.hpp"
#include "mapland/hypercube.hpp"
#include "mapland/instance_io.hpp"
#include "mapland/landscape.hpp"
#include "mapland/lap.hpp"
#include "mapland/projection.hpp"
#include "mapland/search.hpp"
