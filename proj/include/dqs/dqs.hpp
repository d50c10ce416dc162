#pragma once

#include "dqs/matrix.hpp"
#include "dqs/linalg.hpp"
#include "dqs/gks.hpp"
#include "dqs/dynamics.hpp"
#include "dqs/qubit.hpp"
#include "dqs/neutrino.hpp"
#include "dqs/model_io.hpp"
