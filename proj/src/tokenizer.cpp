#include "debatekit/tokenizer.hpp"

#include <cctype>

namespace debatekit {

int ApproxTokenizer::count(std::string_view text) const {
    int n = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {  // UTF-8 continuation bytes stay in-word
            if (!in_word) {
                ++n;
                in_word = true;
            }
        } else {
            in_word = false;
            if (!std::isspace(c)) ++n;  // punctuation and symbols: one token each
        }
    }
    return n;
}

const Tokenizer& default_tokenizer() {
    static const ApproxTokenizer tok;
    return tok;
}

}  // namespace debatekit
