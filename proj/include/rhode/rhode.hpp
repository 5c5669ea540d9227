#pragma once

#include "cache.hpp"
#include "error.hpp"
#include "jump.hpp"
#include "linalg.hpp"
#include "mesh.hpp"
#include "oe.hpp"
#include "oracles.hpp"
#include "polynomial.hpp"
#include "solver.hpp"
