#pragma once

// Pathwise toolkit for locally monotone evolution equations in the Young
// regime: Nikolskii-scale seminorm estimators, the sewing operator, Young
// pairing integrals, local-time machinery, and a semi-implicit solver for
// du = A(t,u) dt + dI_t(u) with p-Laplace and porous-medium operators.

#include "ypde/besov.hpp"
#include "ypde/fbm.hpp"
#include "ypde/gelfand.hpp"
#include "ypde/germ.hpp"
#include "ypde/inner_product.hpp"
#include "ypde/local_time.hpp"
#include "ypde/path_ops.hpp"
#include "ypde/rng.hpp"
#include "ypde/scenario.hpp"
#include "ypde/sewing.hpp"
#include "ypde/solver.hpp"
#include "ypde/time_grid.hpp"
#include "ypde/young.hpp"
