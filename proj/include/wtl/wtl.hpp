#pragma once

#include "wtl/bracket.hpp"
#include "wtl/correspondence.hpp"
#include "wtl/diagrams.hpp"
#include "wtl/errors.hpp"
#include "wtl/ktasep.hpp"
#include "wtl/linalg.hpp"
#include "wtl/markov.hpp"
#include "wtl/matrix_io.hpp"
#include "wtl/models.hpp"
#include "wtl/montecarlo.hpp"
#include "wtl/parallel.hpp"
#include "wtl/queue.hpp"
#include "wtl/rational.hpp"
#include "wtl/rootsys.hpp"
#include "wtl/sparse_matrix.hpp"
#include "wtl/typec.hpp"
