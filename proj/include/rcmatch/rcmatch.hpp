#pragma once

#include "rcmatch/construct.hpp"
#include "rcmatch/error.hpp"
#include "rcmatch/experiment.hpp"
#include "rcmatch/genmodel.hpp"
#include "rcmatch/io.hpp"
#include "rcmatch/multigraph.hpp"
#include "rcmatch/oracle.hpp"
#include "rcmatch/reduce.hpp"
#include "rcmatch/rng.hpp"
#include "rcmatch/stats.hpp"
