#pragma once

#include "dnls/dynamics.hpp"
#include "dnls/errors.hpp"
#include "dnls/experiments.hpp"
#include "dnls/io.hpp"
#include "dnls/lattice.hpp"
#include "dnls/linear.hpp"
#include "dnls/modulation.hpp"
#include "dnls/soliton.hpp"
