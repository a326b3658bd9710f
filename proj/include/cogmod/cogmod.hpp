#pragma once

#include "cogmod/behaviour.hpp"
#include "cogmod/binding.hpp"
#include "cogmod/classifier.hpp"
#include "cogmod/concept_base.hpp"
#include "cogmod/dataset.hpp"
#include "cogmod/errors.hpp"
#include "cogmod/grid.hpp"
#include "cogmod/image_io.hpp"
#include "cogmod/scenario.hpp"
