#pragma once

#include "bounder.hpp"
#include "cost_vector.hpp"
#include "errors.hpp"
#include "ext_int.hpp"
#include "forest.hpp"
#include "frontier.hpp"
#include "graph.hpp"
#include "graph_io.hpp"
#include "zdd_io.hpp"
