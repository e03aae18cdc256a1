#pragma once

#include "stodec/types.hpp"
#include "stodec/rng.hpp"
#include "stodec/parallel.hpp"
#include "stodec/linprog.hpp"
#include "stodec/model.hpp"
#include "stodec/instance_io.hpp"
#include "stodec/ballstage.hpp"
#include "stodec/recourse.hpp"
#include "stodec/decouple.hpp"
#include "stodec/lshaped.hpp"
#include "stodec/baselines.hpp"
#include "stodec/bench.hpp"
