#pragma once

#include "sention/alignment.hpp"
#include "sention/boosting.hpp"
#include "sention/core.hpp"
#include "sention/detector.hpp"
#include "sention/evaluation.hpp"
#include "sention/features_io.hpp"
#include "sention/geometry.hpp"
#include "sention/hog.hpp"
#include "sention/image_io.hpp"
#include "sention/manifest.hpp"
#include "sention/model_io.hpp"
#include "sention/oao.hpp"
#include "sention/parallel.hpp"
#include "sention/selection.hpp"
#include "sention/standardize.hpp"
#include "sention/svm.hpp"
#include "sention/synthetic.hpp"
