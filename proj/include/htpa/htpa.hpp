#pragma once

#include "htpa/census.hpp"
#include "htpa/error.hpp"
#include "htpa/graph.hpp"
#include "htpa/io.hpp"
#include "htpa/limit_dist.hpp"
#include "htpa/parallel.hpp"
#include "htpa/params.hpp"
#include "htpa/quadrature.hpp"
#include "htpa/rng.hpp"
#include "htpa/tables.hpp"
#include "htpa/tail_measure.hpp"
#include "htpa/tauberian.hpp"
