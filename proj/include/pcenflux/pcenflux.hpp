// Copyright 2026 pcenflux authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "pcenflux/config.hpp"
#include "pcenflux/error.hpp"
#include "pcenflux/evaluation.hpp"
#include "pcenflux/fft.hpp"
#include "pcenflux/frontend.hpp"
#include "pcenflux/novelty.hpp"
#include "pcenflux/pcen.hpp"
#include "pcenflux/pipeline.hpp"
#include "pcenflux/spectrogram_io.hpp"
#include "pcenflux/synthesis.hpp"
#include "pcenflux/types.hpp"
#include "pcenflux/wav.hpp"
