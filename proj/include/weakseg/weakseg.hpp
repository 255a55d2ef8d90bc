#pragma once

// Weakly-supervised surface crack segmentation: patch-classifier
// localisation fused with local multi-level Otsu thresholding.

#include "weakseg/bilateral.hpp"
#include "weakseg/classifier.hpp"
#include "weakseg/dataset.hpp"
#include "weakseg/error.hpp"
#include "weakseg/image.hpp"
#include "weakseg/image_io.hpp"
#include "weakseg/metrics.hpp"
#include "weakseg/morphology.hpp"
#include "weakseg/otsu.hpp"
#include "weakseg/parallel.hpp"
#include "weakseg/patch_grid.hpp"
#include "weakseg/pipeline.hpp"
#include "weakseg/resample.hpp"
#include "weakseg/scoremap_io.hpp"
#include "weakseg/threshold.hpp"
#include "weakseg/version.hpp"
