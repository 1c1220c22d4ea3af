// Copyright (c) 2026, The smsfilter Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "corpus.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "format.hpp"
#include "eval.hpp"
#include "lda.hpp"
#include "pipeline.hpp"
#include "random.hpp"
#include "sda.hpp"
#include "stopwords.hpp"
