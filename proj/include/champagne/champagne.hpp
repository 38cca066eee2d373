#pragma once

#include "bounds.hpp"
#include "classify.hpp"
#include "criteria.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "generate.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "report_json.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "shells.hpp"
#include "spacing.hpp"
#include "spatial_index.hpp"
#include "whitney.hpp"
#include "wos.hpp"
