#pragma once

#include "ghostmark/backend.hpp"
#include "ghostmark/config.hpp"
#include "ghostmark/corpus.hpp"
#include "ghostmark/detect.hpp"
#include "ghostmark/errors.hpp"
#include "ghostmark/hash.hpp"
#include "ghostmark/http_backend.hpp"
#include "ghostmark/identifier.hpp"
#include "ghostmark/logprob_file.hpp"
#include "ghostmark/mockmodel.hpp"
#include "ghostmark/rng.hpp"
#include "ghostmark/stats.hpp"
#include "ghostmark/text.hpp"
#include "ghostmark/wordlist.hpp"
