// Copyright 2026 The Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arena/language.hpp"

#include <cctype>

namespace arena {

namespace {

// Short closed-class word lists; French includes the elided forms (l', d',
// qu', ...) that the tokenizer splits off.
const std::map<std::string, std::vector<std::string>>& stopword_lists() {
  static const std::map<std::string, std::vector<std::string>> lists{
      {"fr", {"le", "la", "les", "un", "une", "des", "du", "de", "et", "est", "en", "que", "qui", "pour", "dans",
              "pas", "sur", "au", "aux", "avec", "ce", "cette", "ces", "mais", "ou", "où", "je", "tu", "il", "elle",
              "nous", "vous", "ils", "mon", "ton", "son", "mes", "moi", "toi", "comment", "pourquoi", "quoi",
              "quel", "quelle", "peux", "veux", "sont", "suis", "es", "être", "avoir", "très", "plus", "l", "d",
              "j", "m", "n", "s", "c", "t", "qu"}},
      {"en", {"the", "a", "an", "and", "or", "is", "are", "was", "were", "be", "of", "to", "in", "on", "for",
              "with", "what", "which", "who", "how", "why", "that", "this", "these", "it", "i", "you", "he",
              "she", "we", "they", "my", "your", "can", "could", "would", "should", "do", "does", "not", "from",
              "at", "by", "about", "me"}},
      {"es", {"el", "la", "los", "las", "un", "una", "unos", "y", "es", "son", "de", "del", "que", "en", "por",
              "para", "con", "no", "como", "qué", "cómo", "cuál", "yo", "tú", "él", "ella", "nosotros", "mi",
              "su", "pero", "muy", "está", "estoy", "puedes", "hola", "se", "lo", "al"}},
      {"de", {"der", "die", "das", "und", "ist", "sind", "ein", "eine", "einen", "nicht", "ich", "du", "er",
              "sie", "wir", "ihr", "mit", "von", "zu", "auf", "für", "den", "dem", "des", "was", "wie", "warum",
              "kannst", "bitte", "mir", "mich", "auch", "aber", "oder", "im"}},
      {"it", {"il", "lo", "la", "gli", "le", "un", "una", "e", "è", "di", "che", "per", "con", "non", "sono",
              "mi", "ti", "come", "cosa", "perché", "io", "tu", "lui", "lei", "noi", "voi", "del", "della",
              "puoi", "anche", "ma", "questo", "questa", "nel", "alla"}},
      {"pt", {"o", "a", "os", "as", "um", "uma", "e", "é", "de", "do", "da", "dos", "das", "que", "em", "no",
              "na", "para", "com", "não", "como", "eu", "você", "ele", "ela", "nós", "meu", "minha", "mas",
              "muito", "pode", "isso", "por", "qual", "olá"}},
      {"nl", {"de", "het", "een", "en", "is", "zijn", "van", "dat", "die", "niet", "ik", "je", "jij", "hij",
              "zij", "wij", "we", "met", "voor", "op", "aan", "wat", "hoe", "waarom", "kun", "kan", "ook",
              "maar", "mijn", "er", "naar", "dit"}},
      {"pl", {"i", "w", "z", "na", "nie", "się", "jest", "to", "że", "do", "co", "jak", "ale", "czy", "ja",
              "ty", "on", "ona", "my", "wy", "mój", "moja", "dla", "od", "po", "tak", "być", "możesz", "proszę",
              "dlaczego", "jaki", "jaka"}},
      {"sv", {"och", "att", "det", "som", "en", "ett", "är", "av", "för", "med", "till", "inte", "på", "jag",
              "du", "han", "hon", "vi", "ni", "de", "min", "din", "vad", "hur", "varför", "kan", "men", "om",
              "har", "den"}},
      {"tr", {"ve", "bir", "bu", "da", "de", "için", "ile", "ne", "nasıl", "neden", "ben", "sen", "o", "biz",
              "siz", "onlar", "var", "yok", "mi", "mı", "mu", "çok", "ama", "gibi", "daha", "benim", "şu",
              "kadar", "lütfen"}},
  };
  return lists;
}

bool is_separator(unsigned char ch) {
  if (ch >= 0x80) return false;  // keep multi-byte letters inside words
  return !std::isalnum(ch);
}

}  // namespace

StopwordLanguageDetector::StopwordLanguageDetector(int min_hits) : min_hits_(min_hits) {
  for (const auto& [lang, words] : stopword_lists()) profiles_[lang].insert(words.begin(), words.end());
}

std::vector<std::string> StopwordLanguageDetector::tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto uc = static_cast<unsigned char>(ch);
    if (is_separator(uc)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(uc < 0x80 ? static_cast<char>(std::tolower(uc)) : ch);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::map<std::string, int> StopwordLanguageDetector::scores(std::string_view text) const {
  std::map<std::string, int> out;
  const auto tokens = tokenize(text);
  for (const auto& [lang, words] : profiles_) {
    int hits = 0;
    for (const auto& t : tokens) hits += words.count(t) ? 1 : 0;
    out[lang] = hits;
  }
  return out;
}

std::string StopwordLanguageDetector::detect(std::string_view text) const {
  std::string best;
  int best_hits = 0;
  int runner_up = 0;
  for (const auto& [lang, hits] : scores(text)) {
    if (hits > best_hits) {
      runner_up = best_hits;
      best_hits = hits;
      best = lang;
    } else if (hits > runner_up) {
      runner_up = hits;
    }
  }
  if (best_hits < min_hits_ || best_hits == runner_up) return std::string(kUndetermined);
  return best;
}

std::string tag_language(const Conversation& c, const LanguageDetector& detector) {
  if (c.turns.empty()) return std::string(kUndetermined);
  return detector.detect(c.turns.front().user_text);
}

}  // namespace arena
