#pragma once

#include "flowgebd/ensemble.hpp"
#include "flowgebd/error.hpp"
#include "flowgebd/evaluation.hpp"
#include "flowgebd/flow/corners.hpp"
#include "flowgebd/flow/farneback.hpp"
#include "flowgebd/flow/lucas_kanade.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/flow/sampling.hpp"
#include "flowgebd/flow_normalization.hpp"
#include "flowgebd/frame.hpp"
#include "flowgebd/frame_io.hpp"
#include "flowgebd/parallel.hpp"
#include "flowgebd/patch_grid.hpp"
#include "flowgebd/pixel_tracking.hpp"
#include "flowgebd/prediction.hpp"
#include "flowgebd/refine.hpp"
#include "flowgebd/rng.hpp"
#include "flowgebd/synth.hpp"
