#pragma once

#include "bellscope/cat_prep.hpp"
#include "bellscope/coherent.hpp"
#include "bellscope/erasure.hpp"
#include "bellscope/mk.hpp"
#include "bellscope/numerics/eigen.hpp"
#include "bellscope/numerics/log_signed.hpp"
#include "bellscope/numerics/quadrature.hpp"
#include "bellscope/numerics/special.hpp"
#include "bellscope/root_binning.hpp"
#include "bellscope/sign_binning.hpp"
