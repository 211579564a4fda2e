#pragma once

// Umbrella header: the exact spectral-geometry toolkit for flat
// crystallographic quotients. Individual headers can be included separately;
// io.hpp and cli.hpp additionally require the vendored json/CLI11 headers.

#include "orbispec/catalog.hpp"
#include "orbispec/crystal.hpp"
#include "orbispec/errors.hpp"
#include "orbispec/heat.hpp"
#include "orbispec/krawtchouk.hpp"
#include "orbispec/lattice.hpp"
#include "orbispec/matrix.hpp"
#include "orbispec/rational.hpp"
#include "orbispec/spectrum.hpp"
#include "orbispec/strata.hpp"
#include "orbispec/trace.hpp"
