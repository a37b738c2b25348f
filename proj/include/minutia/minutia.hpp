#pragma once

#include "minutia/image.hpp"
#include "minutia/random.hpp"
#include "minutia/morphology.hpp"
#include "minutia/filters.hpp"
#include "minutia/enhance.hpp"
#include "minutia/corepoint.hpp"
#include "minutia/thinning.hpp"
#include "minutia/minutiae.hpp"
#include "minutia/matching.hpp"
#include "minutia/evaluate.hpp"
#include "minutia/watermark.hpp"
#include "minutia/synthetic.hpp"
