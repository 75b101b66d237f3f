#pragma once

#include "classd/error.hpp"
#include "classd/input_signal.hpp"
#include "classd/model.hpp"
#include "classd/params.hpp"
#include "classd/perturbation.hpp"
#include "classd/propagation.hpp"
#include "classd/simulator.hpp"
#include "classd/small_signal.hpp"
#include "classd/spectral.hpp"
#include "classd/stability.hpp"
#include "classd/steady_state.hpp"
#include "classd/types.hpp"
