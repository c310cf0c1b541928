#pragma once

#include "bipolaron/constants.hpp"
#include "bipolaron/coupling.hpp"
#include "bipolaron/crystal.hpp"
#include "bipolaron/dynamics.hpp"
#include "bipolaron/errors.hpp"
#include "bipolaron/export.hpp"
#include "bipolaron/hilbert.hpp"
#include "bipolaron/thermal.hpp"
#include "bipolaron/tweezer.hpp"
