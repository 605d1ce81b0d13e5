#pragma once

#include "quadcircle/error.hpp"
#include "quadcircle/exec.hpp"
#include "quadcircle/modarith.hpp"
#include "quadcircle/lincong.hpp"
#include "quadcircle/residue.hpp"
#include "quadcircle/quadforms.hpp"
#include "quadcircle/expsums.hpp"
#include "quadcircle/counting.hpp"
#include "quadcircle/densities.hpp"
#include "quadcircle/verify.hpp"
