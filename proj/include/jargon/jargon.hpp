#pragma once

#include "jargon/autograd.hpp"
#include "jargon/config.hpp"
#include "jargon/corpus.hpp"
#include "jargon/detect.hpp"
#include "jargon/encoder.hpp"
#include "jargon/error.hpp"
#include "jargon/evaluate.hpp"
#include "jargon/io.hpp"
#include "jargon/mlm_baseline.hpp"
#include "jargon/model.hpp"
#include "jargon/optim.hpp"
#include "jargon/pos_tagger.hpp"
#include "jargon/pretrain.hpp"
#include "jargon/rng.hpp"
#include "jargon/supervision.hpp"
#include "jargon/synthetic.hpp"
#include "jargon/tensor_archive.hpp"
#include "jargon/text.hpp"
#include "jargon/tokenizer.hpp"
#include "jargon/word2vec.hpp"
