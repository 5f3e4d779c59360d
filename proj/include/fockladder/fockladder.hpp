// fockladder.hpp — umbrella include

#pragma once

#include "fockladder/errors.hpp"
#include "fockladder/experiments.hpp"
#include "fockladder/floquet.hpp"
#include "fockladder/lattice.hpp"
#include "fockladder/meanfield.hpp"
#include "fockladder/observables.hpp"
#include "fockladder/validation.hpp"
#include "fockladder/version.hpp"
