#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ghostmark/errors.hpp"

namespace ghostmark {

enum class backend_kind { http_completion, http_scoring, logprob_file, mock };

struct backend_descriptor {
    backend_kind kind = backend_kind::mock;
    std::string endpoint;   // URL or file path
    std::string model;      // sent to HTTP backends
    std::string mock_name;  // uniform | noisy-uniform | memorizer | partial
    double mock_param = -1; // kind-specific; negative means "use default"
    std::size_t max_tokens = 16;
    int beam_width = 0; // 0: not requested; generation still asks for temperature 0
    double temperature = 0.0;
    int timeout_ms = 30000;
    std::size_t max_parallel = 1;
};

/// "mock:NAME[:PARAM]", "logprob-file:PATH", "http-completion:URL",
/// "http-scoring:URL".
inline backend_descriptor parse_backend(const std::string& s) {
    backend_descriptor d;
    auto starts = [&](const char* p) { return s.rfind(p, 0) == 0; };
    if (starts("mock:")) {
        d.kind = backend_kind::mock;
        std::string rest = s.substr(5);
        auto colon = rest.find(':');
        if (colon == std::string::npos) {
            d.mock_name = rest;
        } else {
            d.mock_name = rest.substr(0, colon);
            try {
                d.mock_param = std::stod(rest.substr(colon + 1));
            } catch (const std::exception&) {
                fail(errc::invalid_argument, "bad mock parameter in \"" + s + "\"");
            }
        }
        if (d.mock_name.empty())
            fail(errc::invalid_argument, "backend \"" + s + "\" names no mock");
    } else if (starts("logprob-file:")) {
        d.kind = backend_kind::logprob_file;
        d.endpoint = s.substr(13);
    } else if (starts("http-completion:")) {
        d.kind = backend_kind::http_completion;
        d.endpoint = s.substr(16);
    } else if (starts("http-scoring:")) {
        d.kind = backend_kind::http_scoring;
        d.endpoint = s.substr(13);
    } else {
        fail(errc::invalid_argument,
             "unknown backend \"" + s +
                 "\" (expected mock:..., logprob-file:..., http-completion:..., http-scoring:...)");
    }
    if (d.kind != backend_kind::mock && d.endpoint.empty())
        fail(errc::invalid_argument, "backend \"" + s + "\" has an empty target");
    return d;
}

inline std::string backend_label(const backend_descriptor& d) {
    switch (d.kind) {
    case backend_kind::mock: return "mock:" + d.mock_name;
    case backend_kind::logprob_file: return "logprob-file:" + d.endpoint;
    case backend_kind::http_completion: return "http-completion:" + d.endpoint;
    case backend_kind::http_scoring: return "http-scoring:" + d.endpoint;
    }
    return "?";
}

/// Per-token scores for a full text. text_offsets[i] is the character offset
/// of token i's first byte; a token's extent runs to the next token's offset
/// (the last one to the end of the text).
struct token_scores {
    std::vector<std::string> tokens;
    std::vector<double> token_logprobs;
    std::vector<std::size_t> text_offsets;
};

class backend {
public:
    virtual ~backend() = default;
    virtual std::string name() const = 0;
    virtual bool supports_generation() const = 0;
    virtual bool supports_scoring() const = 0;
    virtual std::string generate(const std::string& prompt, std::size_t max_tokens) = 0;
    virtual token_scores score(const std::string& doc_id, const std::string& text) = 0;
};

using backend_ptr = std::unique_ptr<backend>;

} // namespace ghostmark
