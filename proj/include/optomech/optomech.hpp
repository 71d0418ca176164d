#pragma once

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/criticality.hpp"
#include "optomech/errors.hpp"
#include "optomech/fluctuations.hpp"
#include "optomech/mean_field.hpp"
#include "optomech/optimal_detuning.hpp"
#include "optomech/params.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/presets.hpp"
#include "optomech/stability.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/sweep.hpp"
#include "optomech/table.hpp"
#include "optomech/types.hpp"
