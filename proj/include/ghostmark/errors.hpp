#pragma once

#include <stdexcept>
#include <string>

namespace ghostmark {

enum class errc {
    // wordlist
    duplicate_word,
    empty_word,
    malformed_dice_index,
    empty_list,
    invalid_word,
    // identifier / registry
    length_too_short,
    duplicate_passphrase,
    unknown_id,
    // corpus
    already_inserted,
    insufficient_documents,
    insufficient_identifiers,
    no_insertion,
    k_too_large,
    // stats
    empty_sequence,
    too_few_samples,
    mixed_k,
    empty_group,
    empty_class,
    // detect / backends
    span_alignment_failure,
    too_few_calibration,
    backend_unreachable,
    item_timeout,
    backend_failure,
    unknown_wordlist,
    digest_mismatch,
    // generic
    invalid_argument,
    io_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::duplicate_word: return "DuplicateWord";
        case errc::empty_word: return "EmptyWord";
        case errc::malformed_dice_index: return "MalformedDiceIndex";
        case errc::empty_list: return "EmptyList";
        case errc::invalid_word: return "InvalidWord";
        case errc::length_too_short: return "LengthTooShort";
        case errc::duplicate_passphrase: return "DuplicatePassphrase";
        case errc::unknown_id: return "UnknownId";
        case errc::already_inserted: return "AlreadyInserted";
        case errc::insufficient_documents: return "InsufficientDocuments";
        case errc::insufficient_identifiers: return "InsufficientIdentifiers";
        case errc::no_insertion: return "NoInsertion";
        case errc::k_too_large: return "KTooLarge";
        case errc::empty_sequence: return "EmptySequence";
        case errc::too_few_samples: return "TooFewSamples";
        case errc::mixed_k: return "MixedK";
        case errc::empty_group: return "EmptyGroup";
        case errc::empty_class: return "EmptyClass";
        case errc::span_alignment_failure: return "SpanAlignmentFailure";
        case errc::too_few_calibration: return "TooFewCalibration";
        case errc::backend_unreachable: return "BackendUnreachable";
        case errc::item_timeout: return "PerItemTimeout";
        case errc::backend_failure: return "BackendFailure";
        case errc::unknown_wordlist: return "UnknownWordlist";
        case errc::digest_mismatch: return "DigestMismatch";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

/// Toolkit-wide exception carrying a stable error code.
class error : public std::runtime_error {
public:
    error(errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

    /// Validation errors map to CLI exit code 2; runtime/backend failures to 1.
    bool is_runtime_failure() const noexcept {
        return code_ == errc::backend_unreachable || code_ == errc::item_timeout ||
               code_ == errc::backend_failure || code_ == errc::io_error;
    }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw error(code, message);
}

} // namespace ghostmark
