#pragma once

#include <cstdlib>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "ghostmark/backend.hpp"
#include "ghostmark/errors.hpp"

namespace ghostmark {

/// Environment variable holding the bearer token for HTTP backends.
inline const char* api_token_env = "GHOSTMARK_API_TOKEN";

/// Client for completion endpoints that follow the completions-with-logprobs
/// convention: POST {model, prompt, max_tokens, logprobs, echo} and read
/// choices[0].text plus choices[0].logprobs.{tokens, token_logprobs,
/// text_offset}. Scoring uses echo mode over the full document text.
class http_backend : public backend {
public:
    http_backend(backend_descriptor d) : desc_(std::move(d)) {
        const std::string& url = desc_.endpoint;
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            fail(errc::invalid_argument, "backend URL needs a scheme: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_ = url;
            path_ = "/v1/completions";
        } else {
            base_ = url.substr(0, path_start);
            path_ = url.substr(path_start);
        }
    }

    std::string name() const override { return backend_label(desc_); }
    bool supports_generation() const override { return desc_.kind == backend_kind::http_completion; }
    bool supports_scoring() const override { return true; }

    std::string generate(const std::string& prompt, std::size_t max_tokens) override {
        nlohmann::json req;
        if (!desc_.model.empty()) req["model"] = desc_.model;
        req["prompt"] = prompt;
        req["max_tokens"] = max_tokens;
        req["temperature"] = desc_.temperature;
        if (desc_.beam_width > 0) req["beam_width"] = desc_.beam_width;
        nlohmann::json res = post(req);
        try {
            return res.at("choices").at(0).at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            fail(errc::backend_failure, std::string("malformed completion: ") + e.what());
        }
    }

    token_scores score(const std::string& doc_id, const std::string& text) override {
        nlohmann::json req;
        if (!desc_.model.empty()) req["model"] = desc_.model;
        req["prompt"] = text;
        req["max_tokens"] = 0;
        req["logprobs"] = 1;
        req["echo"] = true;
        nlohmann::json res = post(req);
        token_scores ts;
        try {
            const auto& lp = res.at("choices").at(0).at("logprobs");
            ts.tokens = lp.at("tokens").get<std::vector<std::string>>();
            for (const auto& v : lp.at("token_logprobs")) {
                // The first echoed token usually has no conditioning context
                // and is reported as null.
                ts.token_logprobs.push_back(v.is_null() ? 0.0 : v.get<double>());
            }
            ts.text_offsets = lp.at("text_offset").get<std::vector<std::size_t>>();
        } catch (const nlohmann::json::exception& e) {
            fail(errc::backend_failure,
                 "malformed logprobs for " + doc_id + ": " + e.what());
        }
        if (ts.tokens.size() != ts.token_logprobs.size() || ts.tokens.size() != ts.text_offsets.size())
            fail(errc::backend_failure,
                 "logprob arrays for " + doc_id + " differ in length");
        return ts;
    }

private:
    nlohmann::json post(const nlohmann::json& body) {
        // One client per request keeps calls independent across the
        // bounded-parallel workers.
        httplib::Client cli(base_);
        cli.set_connection_timeout(0, desc_.timeout_ms * 1000LL);
        cli.set_read_timeout(desc_.timeout_ms / 1000, (desc_.timeout_ms % 1000) * 1000);
        cli.set_write_timeout(desc_.timeout_ms / 1000, (desc_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (const char* tok = std::getenv(api_token_env); tok && *tok)
            headers.emplace("Authorization", std::string("Bearer ") + tok);

        auto res = cli.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            switch (res.error()) {
            case httplib::Error::Connection:
            case httplib::Error::ConnectionTimeout:
                fail(errc::backend_unreachable, "cannot connect to " + base_);
            case httplib::Error::Read:
            case httplib::Error::Write:
                fail(errc::item_timeout, "timed out talking to " + base_ + path_);
            default:
                fail(errc::backend_failure,
                     "transport error " + httplib::to_string(res.error()));
            }
        }
        if (res->status != 200)
            fail(errc::backend_failure,
                 "HTTP " + std::to_string(res->status) + " from " + base_ + path_);
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            fail(errc::backend_failure, std::string("response is not JSON: ") + e.what());
        }
    }

    backend_descriptor desc_;
    std::string base_;
    std::string path_;
};

} // namespace ghostmark
