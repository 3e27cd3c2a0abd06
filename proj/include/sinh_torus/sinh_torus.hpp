#pragma once

#include "sinh_torus/core.hpp"
#include "sinh_torus/dynamics.hpp"
#include "sinh_torus/integrate.hpp"
#include "sinh_torus/lawson_hsiang.hpp"
#include "sinh_torus/nullity.hpp"
#include "sinh_torus/quadrature.hpp"
#include "sinh_torus/surface.hpp"
