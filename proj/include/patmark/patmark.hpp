#pragma once

// Convenience umbrella for the whole library.

#include "patmark/bounds.hpp"
#include "patmark/config.hpp"
#include "patmark/corpus.hpp"
#include "patmark/detection.hpp"
#include "patmark/edits.hpp"
#include "patmark/errors.hpp"
#include "patmark/evaluation.hpp"
#include "patmark/generation.hpp"
#include "patmark/models.hpp"
#include "patmark/partition.hpp"
#include "patmark/pattern.hpp"
#include "patmark/pipeline.hpp"
#include "patmark/random.hpp"
