#pragma once

#include "saddle/domain.hpp"
#include "saddle/errors.hpp"
#include "saddle/linalg.hpp"
#include "saddle/minimax.hpp"
#include "saddle/objective.hpp"
#include "saddle/phi.hpp"
#include "saddle/quadratic.hpp"
#include "saddle/spectral.hpp"
