#pragma once

#include "morphseg/analysis.hpp"
#include "morphseg/config.hpp"
#include "morphseg/context.hpp"
#include "morphseg/corpus.hpp"
#include "morphseg/derivational.hpp"
#include "morphseg/error.hpp"
#include "morphseg/io.hpp"
#include "morphseg/parallel.hpp"
#include "morphseg/probe.hpp"
#include "morphseg/random.hpp"
#include "morphseg/resources.hpp"
#include "morphseg/stats.hpp"
#include "morphseg/text.hpp"
#include "morphseg/vocab.hpp"
#include "morphseg/wordpiece.hpp"
