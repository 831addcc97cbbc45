#pragma once

#include "slopekit/commands.hpp"
#include "slopekit/curve_complex.hpp"
#include "slopekit/eikonal.hpp"
#include "slopekit/error.hpp"
#include "slopekit/extended.hpp"
#include "slopekit/gallery.hpp"
#include "slopekit/io.hpp"
#include "slopekit/metric_space.hpp"
#include "slopekit/parallel.hpp"
#include "slopekit/slope.hpp"
#include "slopekit/verifier.hpp"
