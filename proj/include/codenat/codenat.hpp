#pragma once

// Umbrella header for the full toolkit.

#include "codenat/attacks.hpp"
#include "codenat/bleu.hpp"
#include "codenat/candidates.hpp"
#include "codenat/config.hpp"
#include "codenat/corpus.hpp"
#include "codenat/errors.hpp"
#include "codenat/hash.hpp"
#include "codenat/http.hpp"
#include "codenat/judge.hpp"
#include "codenat/lang.hpp"
#include "codenat/metrics.hpp"
#include "codenat/ngram.hpp"
#include "codenat/pipeline.hpp"
#include "codenat/prompts.hpp"
#include "codenat/rename.hpp"
#include "codenat/snippet.hpp"
#include "codenat/stats.hpp"
#include "codenat/subtoken.hpp"
#include "codenat/syntax.hpp"
#include "codenat/token.hpp"
#include "codenat/version.hpp"
#include "codenat/victim.hpp"
