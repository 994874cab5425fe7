#pragma once

#include "nlcp/dataset_io.hpp"
#include "nlcp/deconv.hpp"
#include "nlcp/discretization.hpp"
#include "nlcp/error.hpp"
#include "nlcp/eval.hpp"
#include "nlcp/model.hpp"
#include "nlcp/noise_estimation.hpp"
#include "nlcp/robust.hpp"
#include "nlcp/split_cp.hpp"
#include "nlcp/synth.hpp"
