#pragma once

#include "trayrec/classify.hpp"
#include "trayrec/descriptor.hpp"
#include "trayrec/errors.hpp"
#include "trayrec/evaluate.hpp"
#include "trayrec/feature.hpp"
#include "trayrec/feature_store.hpp"
#include "trayrec/manifest.hpp"
#include "trayrec/menu.hpp"
#include "trayrec/multiclass.hpp"
#include "trayrec/recognize.hpp"
#include "trayrec/region.hpp"
#include "trayrec/synthetic.hpp"
#include "trayrec/tray_io.hpp"
