#pragma once

#include <fstream>
#include <string>
#include <unordered_map>

#include "json.hpp"

#include "ghostmark/backend.hpp"
#include "ghostmark/errors.hpp"
#include "ghostmark/text.hpp"

namespace ghostmark {

/// Offline scoring from precomputed per-token logprobs. Input is JSONL with
/// one record per document: {doc_id, tokens:[...], token_logprobs:[...],
/// text_offsets:[...]}. Lets detection run with no model access at all.
class logprob_file_backend : public backend {
public:
    explicit logprob_file_backend(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(errc::io_error, "cannot open logprob file " + path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                fail(errc::io_error,
                     "logprob file line " + std::to_string(line_no) + ": " + e.what());
            }
            try {
                std::string doc_id = j.at("doc_id").get<std::string>();
                token_scores ts;
                ts.tokens = j.at("tokens").get<std::vector<std::string>>();
                ts.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
                ts.text_offsets = j.at("text_offsets").get<std::vector<std::size_t>>();
                if (ts.tokens.size() != ts.token_logprobs.size() ||
                    ts.tokens.size() != ts.text_offsets.size())
                    fail(errc::io_error, "logprob file line " + std::to_string(line_no) +
                                             ": tokens, token_logprobs and text_offsets differ in length");
                by_doc_[std::move(doc_id)] = std::move(ts);
            } catch (const error&) {
                throw;
            } catch (const nlohmann::json::exception& e) {
                fail(errc::io_error,
                     "logprob file line " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    std::string name() const override { return "logprob-file:" + path_; }
    bool supports_generation() const override { return false; }
    bool supports_scoring() const override { return true; }

    std::string generate(const std::string&, std::size_t) override {
        fail(errc::invalid_argument, "logprob-file backends cannot generate");
    }

    token_scores score(const std::string& doc_id, const std::string&) override {
        auto it = by_doc_.find(doc_id);
        if (it == by_doc_.end())
            fail(errc::backend_failure, "no precomputed logprobs for " + doc_id);
        return it->second;
    }

    std::size_t size() const { return by_doc_.size(); }

private:
    std::string path_;
    std::unordered_map<std::string, token_scores> by_doc_;
};

} // namespace ghostmark
