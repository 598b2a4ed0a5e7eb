#pragma once

#include "rellich/banded.hpp"
#include "rellich/box_operator.hpp"
#include "rellich/config.hpp"
#include "rellich/core.hpp"
#include "rellich/estimates.hpp"
#include "rellich/experiments.hpp"
#include "rellich/fit.hpp"
#include "rellich/grid.hpp"
#include "rellich/io.hpp"
#include "rellich/krylov.hpp"
#include "rellich/norms.hpp"
#include "rellich/parallel.hpp"
#include "rellich/phi.hpp"
#include "rellich/plot.hpp"
#include "rellich/probes.hpp"
#include "rellich/region.hpp"
#include "rellich/sector_operator.hpp"
#include "rellich/spectral.hpp"
#include "rellich/twisted.hpp"
