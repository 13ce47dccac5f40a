#pragma once

#include "sta/counterdiabatic.hpp"
#include "sta/eigenstates.hpp"
#include "sta/ermakov.hpp"
#include "sta/errors.hpp"
#include "sta/fourier.hpp"
#include "sta/grid.hpp"
#include "sta/hermite.hpp"
#include "sta/invariant.hpp"
#include "sta/io.hpp"
#include "sta/propagate.hpp"
#include "sta/protocol.hpp"
#include "sta/quadratic.hpp"
#include "sta/raman.hpp"
#include "sta/scaling.hpp"
#include "sta/units.hpp"
#include "sta/wavefunction.hpp"
