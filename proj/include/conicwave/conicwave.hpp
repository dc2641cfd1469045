#pragma once

#include "conicwave/bessel.hpp"
#include "conicwave/clairaut.hpp"
#include "conicwave/config.hpp"
#include "conicwave/csv.hpp"
#include "conicwave/error.hpp"
#include "conicwave/flow.hpp"
#include "conicwave/io.hpp"
#include "conicwave/length_spectrum.hpp"
#include "conicwave/manifest.hpp"
#include "conicwave/model.hpp"
#include "conicwave/ode.hpp"
#include "conicwave/oracle.hpp"
#include "conicwave/parallel.hpp"
#include "conicwave/rational.hpp"
#include "conicwave/relations.hpp"
#include "conicwave/spectrum.hpp"
#include "conicwave/trace.hpp"
