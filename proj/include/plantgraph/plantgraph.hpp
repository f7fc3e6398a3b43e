#pragma once
// Convenience header pulling in the whole library.

#include "plantgraph/error.hpp"
#include "plantgraph/graph.hpp"
#include "plantgraph/graph_io.hpp"
#include "plantgraph/orient.hpp"
#include "plantgraph/pcf.hpp"
#include "plantgraph/proteus.hpp"
#include "plantgraph/simplify.hpp"
