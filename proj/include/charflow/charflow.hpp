#pragma once

#include "charflow/char_state.hpp"
#include "charflow/char_transform.hpp"
#include "charflow/config.hpp"
#include "charflow/diagnostics.hpp"
#include "charflow/errors.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/integrator.hpp"
#include "charflow/io.hpp"
#include "charflow/kernel.hpp"
#include "charflow/numerics.hpp"
#include "charflow/polynomial.hpp"
#include "charflow/reconstruct.hpp"
#include "charflow/reference_solver.hpp"
#include "charflow/scenarios.hpp"
#include "charflow/semilinear.hpp"
#include "charflow/stepping.hpp"
