#pragma once

#include "vfiqa/correlation.hpp"
#include "vfiqa/flo_io.hpp"
#include "vfiqa/frame.hpp"
#include "vfiqa/image_metrics.hpp"
#include "vfiqa/manifest.hpp"
#include "vfiqa/map_export.hpp"
#include "vfiqa/motion_estimation.hpp"
#include "vfiqa/motion_field.hpp"
#include "vfiqa/pipeline.hpp"
#include "vfiqa/spatial_metrics.hpp"
#include "vfiqa/temporal_metrics.hpp"
#include "vfiqa/video_io.hpp"
