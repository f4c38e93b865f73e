// Closed word list backing the root-verb fallback when no dependency parse is
// available. Base forms are matched after stripping regular inflections;
// irregular past forms are listed explicitly. Auxiliaries and modals are left
// out because they rarely head a vignette clause.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "moralvig/features.hpp"

namespace moralvig {

namespace {

constexpr std::string_view kBaseVerbs[] = {
    "abandon", "abuse", "accept", "accuse", "act", "add", "admit", "adopt", "agree",
    "allow", "annoy", "answer", "apologize", "argue", "arrive", "ask", "assault", "attack",
    "attend", "avoid", "bake", "ban", "bark", "bathe", "beat", "beg", "begin", "behave",
    "belittle", "believe", "belong", "betray", "bet", "bite", "blame", "bleed", "block",
    "blow", "boast", "boo", "borrow", "bother", "break", "bribe", "bring", "build", "bully",
    "burn", "burp", "buy", "call", "care", "carry", "catch", "celebrate", "change", "chase",
    "cheat", "check", "cheer", "choose", "clap", "clean", "climb", "close", "collect", "come",
    "comfort", "comment", "complain", "complete", "compliment", "confess", "consider", "console",
    "contribute", "cook", "cooperate", "copy", "cough", "count", "cover", "criticize", "cry",
    "curse", "cut", "damage", "dance", "dare", "deceive", "decide", "defend", "defy", "deliver",
    "deny", "describe", "desecrate", "destroy", "die", "dig", "disagree", "disappoint",
    "discard", "discuss", "disobey", "disrespect", "dodge", "donate", "drag", "draw", "dress",
    "drink", "drive", "drop", "drown", "dump", "earn", "eat", "embarrass", "embezzle",
    "encourage", "endanger", "enjoy", "enter", "escape", "exaggerate", "exclude",
    "expose", "fail", "fake", "fall", "feed", "feel", "fight", "fill", "find", "finish",
    "fire", "fix", "flee", "flirt", "follow", "forget", "forgive", "forge", "gamble", "gather",
    "get", "give", "glare", "go", "gossip", "grab", "greet", "grow", "guide", "harass", "harm",
    "hate", "hear", "help", "hide", "hire", "hit", "hold", "honor", "hug", "humiliate", "hunt",
    "hurt", "ignore", "injure", "insult", "interrupt", "invite", "join", "joke", "jump", "keep",
    "kick", "kidnap", "kill", "kiss", "knock", "laugh", "lead", "leak", "learn", "leave", "lend",
    "let", "lick", "lie", "lift", "listen", "live", "lock", "look", "lose", "love",
    "make", "manipulate", "marry", "masturbate", "meet", "mimic", "miss", "mock", "move",
    "murder", "neglect", "notice", "obey", "offer", "open", "organize", "overcharge",
    "owe", "paint", "participate", "pass", "pay", "perform", "pick", "pinch", "plagiarize",
    "plan", "play", "poison", "pour", "praise", "pray", "prepare", "pretend", "prevent",
    "promise", "protect", "protest", "provide", "pull", "punch", "punish", "push", "put",
    "quit", "rape", "reach", "read", "receive", "recommend", "refuse", "reject", "relax",
    "remember", "remind", "remove", "rent", "repair", "repay", "report", "rescue", "resign",
    "respect", "respond", "return", "reveal", "ride", "ridicule", "rip", "rob", "ruin", "run",
    "sabotage", "save", "say", "scold", "scream", "see", "sell", "send", "serve", "shake",
    "share", "shoot", "shout", "show", "shove", "sign", "sing", "sit", "skip", "slap", "sleep",
    "smack", "smash", "smile", "smoke", "sneak", "snub", "solve", "speak", "spend", "spill",
    "spit", "spread", "stab", "stand", "stare", "start", "starve", "stay", "steal", "step",
    "stop", "strike", "struggle", "study", "submit", "support", "surprise", "swear", "swim",
    "take", "talk", "taunt", "teach", "tear", "tease", "tell", "thank", "threaten", "throw",
    "torture", "touch", "trade", "train", "trash", "travel", "treat", "trick", "trip", "trust",
    "try", "turn", "undermine", "urinate", "use", "vandalize", "visit", "vote", "wait", "wake",
    "walk", "want", "warn", "wash", "waste", "watch", "wave", "wear", "welcome", "whip",
    "whisper", "win", "wipe", "work", "worry", "wreck", "write", "yell",
};

constexpr std::pair<std::string_view, std::string_view> kIrregular[] = {
    {"ate", "eat"},       {"beaten", "beat"},   {"began", "begin"},     {"begun", "begin"},
    {"bitten", "bite"},   {"bled", "bleed"},      {"blew", "blow"},
    {"blown", "blow"},    {"broke", "break"},   {"broken", "break"},    {"brought", "bring"},
    {"built", "build"},   {"bought", "buy"},    {"caught", "catch"},    {"chose", "choose"},
    {"chosen", "choose"}, {"came", "come"},     {"dug", "dig"},         {"drew", "draw"},
    {"drawn", "draw"},    {"drank", "drink"},   {"drove", "drive"},
    {"driven", "drive"},  {"eaten", "eat"},     {"fell", "fall"},       {"fallen", "fall"},
    {"fed", "feed"},      {"felt", "feel"},     {"fought", "fight"},    {"found", "find"},
    {"fled", "flee"},     {"forgot", "forget"}, {"forgotten", "forget"}, {"forgave", "forgive"},
    {"forgiven", "forgive"}, {"got", "get"},    {"gotten", "get"},      {"gave", "give"},
    {"given", "give"},    {"went", "go"},       {"gone", "go"},         {"goes", "go"},
    {"grew", "grow"},     {"grown", "grow"},    {"heard", "hear"},      {"hid", "hide"},
    {"hidden", "hide"},   {"held", "hold"},     {"kept", "keep"},       {"led", "lead"},
    {"left", "leave"},    {"lent", "lend"},     {"lied", "lie"},
    {"lying", "lie"},     {"lost", "lose"},     {"made", "make"},       {"met", "meet"},
    {"paid", "pay"},      {"ran", "run"},       {"rode", "ride"},       {"ridden", "ride"},
    {"said", "say"},      {"saw", "see"},       {"seen", "see"},        {"sold", "sell"},
    {"sent", "send"},     {"shook", "shake"},   {"shaken", "shake"},    {"shot", "shoot"},
    {"shown", "show"},    {"sang", "sing"},     {"sung", "sing"},       {"sat", "sit"},
    {"slept", "sleep"},   {"spoke", "speak"},   {"spoken", "speak"},    {"spent", "spend"},
    {"spat", "spit"},     {"stood", "stand"},   {"stole", "steal"},     {"stolen", "steal"},
    {"struck", "strike"}, {"swore", "swear"},   {"sworn", "swear"},     {"swam", "swim"},
    {"took", "take"},     {"taken", "take"},    {"taught", "teach"},    {"tore", "tear"},
    {"torn", "tear"},     {"told", "tell"},     {"threw", "throw"},     {"thrown", "throw"},
    {"woke", "wake"},     {"woken", "wake"},    {"wore", "wear"},       {"worn", "wear"},
    {"won", "win"},       {"wrote", "write"},   {"written", "write"},   {"dying", "die"},
};

const std::unordered_set<std::string_view>& base_set() {
  static const std::unordered_set<std::string_view> set(std::begin(kBaseVerbs),
                                                       std::end(kBaseVerbs));
  return set;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_map() {
  static const std::unordered_map<std::string_view, std::string_view> map(
      std::begin(kIrregular), std::end(kIrregular));
  return map;
}

bool is_base(std::string_view w) { return base_set().contains(w); }

// Stem with a doubled final consonant undone: "stopp" -> "stop".
std::optional<std::string> undouble(std::string_view stem) {
  if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
    std::string s(stem.substr(0, stem.size() - 1));
    if (is_base(s)) return s;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> verb_lemma(std::string_view word) {
  if (word.empty()) return std::nullopt;
  if (is_base(word)) return std::string(word);
  if (auto it = irregular_map().find(word); it != irregular_map().end()) {
    return std::string(it->second);
  }
  auto try_stem = [](std::string_view stem) -> std::optional<std::string> {
    if (is_base(stem)) return std::string(stem);
    return std::nullopt;
  };
  if (word.ends_with("ies")) {
    if (auto s = try_stem(std::string(word.substr(0, word.size() - 3)) + "y")) return s;
  }
  if (word.ends_with("es")) {
    if (auto s = try_stem(word.substr(0, word.size() - 2))) return s;
  }
  if (word.ends_with("s") && !word.ends_with("ss")) {
    if (auto s = try_stem(word.substr(0, word.size() - 1))) return s;
  }
  if (word.ends_with("ied")) {
    if (auto s = try_stem(std::string(word.substr(0, word.size() - 3)) + "y")) return s;
  }
  if (word.ends_with("ed")) {
    const auto stem = word.substr(0, word.size() - 2);
    if (auto s = try_stem(stem)) return s;
    if (auto s = try_stem(word.substr(0, word.size() - 1))) return s;
    if (auto s = undouble(stem)) return s;
  }
  if (word.ends_with("ing") && word.size() > 4) {
    const auto stem = word.substr(0, word.size() - 3);
    if (auto s = try_stem(stem)) return s;
    if (auto s = try_stem(std::string(stem) + "e")) return s;
    if (auto s = undouble(stem)) return s;
  }
  return std::nullopt;
}

}  // namespace moralvig
