#pragma once

#include "btsbm/clustering.hpp"
#include "btsbm/diagnostics.hpp"
#include "btsbm/eigensolver.hpp"
#include "btsbm/error.hpp"
#include "btsbm/experiment.hpp"
#include "btsbm/gml.hpp"
#include "btsbm/graph.hpp"
#include "btsbm/io.hpp"
#include "btsbm/metrics.hpp"
#include "btsbm/model_io.hpp"
#include "btsbm/node_code.hpp"
#include "btsbm/population.hpp"
#include "btsbm/random.hpp"
#include "btsbm/sampling.hpp"
#include "btsbm/sparse_sym.hpp"
#include "btsbm/subspace.hpp"
#include "btsbm/tree_model.hpp"
