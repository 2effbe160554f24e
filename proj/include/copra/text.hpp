#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace copra::text {

inline bool is_word_byte(unsigned char c) {
    // Non-ASCII bytes count as word characters so UTF-8 sequences stay inside
    // one token. ASCII case folding only.
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

inline char fold(unsigned char c) {
    return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
}

inline bool starts_url(std::string_view s, std::size_t i) {
    auto has = [&](std::string_view p) {
        if (i + p.size() > s.size()) return false;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (fold(static_cast<unsigned char>(s[i + j])) != p[j]) return false;
        return true;
    };
    return has("http://") || has("https://") || has("www.");
}

// Word tokens, lowercased (ASCII fold). URLs become "<url>", @-mentions
// "<user>". An apostrophe between word characters stays inside the token
// ("don't" -> "don't").
inline std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (starts_url(s, i)) {
            while (i < n && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            out.emplace_back("<url>");
            continue;
        }
        if (c == '@' && i + 1 < n && is_word_byte(static_cast<unsigned char>(s[i + 1]))) {
            ++i;
            while (i < n && is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
            out.emplace_back("<user>");
            continue;
        }
        if (is_word_byte(c)) {
            std::string tok;
            while (i < n) {
                unsigned char b = static_cast<unsigned char>(s[i]);
                if (is_word_byte(b)) {
                    tok.push_back(fold(b));
                    ++i;
                } else if (b == '\'' && i + 1 < n && is_word_byte(static_cast<unsigned char>(s[i + 1])) && !tok.empty()) {
                    tok.push_back('\'');
                    ++i;
                } else {
                    break;
                }
            }
            out.push_back(std::move(tok));
            continue;
        }
        ++i;
    }
    return out;
}

// Frozen syllable heuristic: count vowel letters a,e,i,o,u individually
// ('y' only when the word has no other vowel), subtract one for a terminal
// silent 'e' (not "-le" after a consonant), minimum 1. Counting letters
// rather than vowel clusters is deliberate and the readability expectations
// in the tests are derived from exactly this rule.
inline int count_syllables(std::string_view word) {
    std::string w;
    w.reserve(word.size());
    for (unsigned char c : word)
        if (std::isalpha(c)) w.push_back(static_cast<char>(std::tolower(c)));
    if (w.empty()) return 0;

    auto is_vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    };
    int count = 0;
    for (char c : w)
        if (is_vowel(c)) ++count;
    if (count == 0) {
        for (char c : w)
            if (c == 'y') ++count;
    }
    const std::size_t n = w.size();
    if (count > 1 && n >= 2 && w[n - 1] == 'e') {
        const bool le_ending = n >= 3 && w[n - 2] == 'l' && !is_vowel(w[n - 3]);
        if (!le_ending) --count;
    }
    return std::max(count, 1);
}

// Sentence terminators are runs of '.', '!' or '?'. A trailing fragment with
// word content counts as one sentence, so the count is zero only for text
// with no words at all.
inline int count_sentences(std::string_view s) {
    auto is_term = [](char c) { return c == '.' || c == '!' || c == '?'; };
    int runs = 0;
    bool in_run = false;
    bool word_since_term = false;
    bool any_word = false;
    for (char c : s) {
        if (is_term(c)) {
            if (!in_run) ++runs;
            in_run = true;
            word_since_term = false;
        } else {
            in_run = false;
            if (is_word_byte(static_cast<unsigned char>(c))) {
                word_since_term = true;
                any_word = true;
            }
        }
    }
    if (word_since_term) ++runs;
    if (runs == 0 && any_word) runs = 1;
    return runs;
}

struct Readability {
    double flesch_reading_ease = 0.0;
    double fk_grade = 0.0;
    double gunning_fog = 0.0;
    bool degenerate = false;  // no words or no sentences; metrics forced to 0
};

// Placeholder tokens ("<url>", "<user>") count as one-syllable words.
inline int token_syllables(const std::string& tok) {
    if (tok == "<url>" || tok == "<user>") return 1;
    return count_syllables(tok);
}

inline Readability readability(const std::vector<std::string>& tokens, std::string_view raw_text) {
    Readability r;
    const double words = static_cast<double>(tokens.size());
    const double sentences = static_cast<double>(count_sentences(raw_text));
    if (words == 0.0 || sentences == 0.0) {
        r.degenerate = true;
        return r;
    }
    double syllables = 0.0;
    double complex_words = 0.0;  // >= 3 syllables
    for (const auto& t : tokens) {
        const int sy = token_syllables(t);
        syllables += sy;
        if (sy >= 3) complex_words += 1.0;
    }
    const double wps = words / sentences;
    const double spw = syllables / words;
    r.flesch_reading_ease = 206.835 - 1.015 * wps - 84.6 * spw;
    r.fk_grade = 0.39 * wps + 11.8 * spw - 15.59;
    r.gunning_fog = 0.4 * (wps + 100.0 * complex_words / words);
    return r;
}

struct Richness {
    double ttr = 0.0;          // distinct tokens / tokens
    int hapax_legomena = 0;    // tokens occurring exactly once
    int hapax_dislegomena = 0; // tokens occurring exactly twice
};

inline Richness richness(const std::vector<std::string>& tokens) {
    Richness r;
    if (tokens.empty()) return r;
    std::unordered_map<std::string, int> counts;
    for (const auto& t : tokens) ++counts[t];
    r.ttr = static_cast<double>(counts.size()) / static_cast<double>(tokens.size());
    for (const auto& [tok, c] : counts) {
        if (c == 1) ++r.hapax_legomena;
        else if (c == 2) ++r.hapax_dislegomena;
    }
    return r;
}

}  // namespace copra::text
