#pragma once

#include "config.hpp"
#include "diagnostics.hpp"
#include "discrete_ops.hpp"
#include "errors.hpp"
#include "field_io.hpp"
#include "grid_domain.hpp"
#include "model.hpp"
#include "pipeline.hpp"
#include "reaction.hpp"
#include "report_json.hpp"
#include "scalar_solver.hpp"
#include "solver_options.hpp"
#include "sparse_assembly.hpp"
#include "state_field.hpp"
#include "system_solver.hpp"
#include "uniqueness.hpp"
