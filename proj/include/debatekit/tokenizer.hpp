#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace debatekit {

/// Token counting interface. The default implementation approximates
/// backend tokenizers by counting alphanumeric runs and single punctuation
/// marks; an adapter can instead report backend-provided usage counts.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual int count(std::string_view text) const = 0;
};

/// Whitespace + punctuation tokenizer: each maximal run of alphanumeric
/// characters is one token, every other non-space character is one token.
class ApproxTokenizer final : public Tokenizer {
public:
    int count(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

}  // namespace debatekit
