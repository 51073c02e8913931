#pragma once

// Umbrella header for the code-mixed sentiment classification library.

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/evaltune.hpp"
#include "cmsent/features.hpp"
#include "cmsent/lexicons.hpp"
#include "cmsent/model.hpp"
#include "cmsent/text.hpp"
#include "cmsent/textprep.hpp"
