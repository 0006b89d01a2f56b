#pragma once

#include "ctnet/interface/gradient_suite.hpp"

namespace ctnet::testing {

using ctnet::check_layer;
using ctnet::check_model;
using ctnet::mse_against;
using ctnet::mse_upstream;
using ctnet::random_tensor;
using ctnet::randomize;

}  // namespace ctnet::testing
