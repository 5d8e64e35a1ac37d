#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "refeed/lm.hpp"

namespace refeed::lm {

/// One scripted rule: fires when `match` occurs as a substring of the
/// prompt. An empty match string matches every prompt.
struct ScriptRule {
    std::string match;
    std::vector<std::string> completions;  // rotation for sampling; [0] for greedy
    // Per-token logprob for completions produced by this rule and for
    // score_completion fallbacks. Overrides the script default.
    std::optional<double> token_logprob;
    // Exact per-token logprobs keyed by completion text; wins over the
    // constants when score_completion (or generation) sees that exact text.
    std::map<std::string, std::vector<double>> completion_logprobs;
};

struct Script {
    BackendCapabilities capabilities{/*supports_logprobs=*/true, /*supports_sampling=*/true,
                                     /*max_context_tokens=*/4096};
    std::vector<ScriptRule> rules;  // first match wins; must end in a default rule
    double default_token_logprob = -1.0;

    static Script from_json_text(const std::string& text);
    static Script from_file(const std::filesystem::path& path);
};

/// Deterministic backend driven by a script: a pure function of
/// (script, prompt, params, call-sequence index). Greedy decoding always
/// returns the matched rule's first completion and never advances the
/// rotation; nucleus decoding cycles through the rule's completions.
/// Tokens are whitespace runs, so joining reported tokens with single
/// spaces reconstructs the (whitespace-normalized) text.
class ScriptedBackend : public LmBackend {
public:
    explicit ScriptedBackend(Script script);

    Generation generate(const std::string& prompt, const DecodeParams& params) override;
    std::vector<Generation> sample_n(const std::string& prompt, int n,
                                     const DecodeParams& params) override;
    ScoredCompletion score_completion(const std::string& prompt,
                                      const std::string& completion) override;
    BackendCapabilities capabilities() const override { return script_.capabilities; }
    std::string name() const override { return "scripted"; }

private:
    const ScriptRule& match_rule(const std::string& prompt) const;
    Generation render(const ScriptRule& rule, const std::string& text,
                      const DecodeParams& params) const;
    void check_context(const std::string& prompt) const;

    Script script_;
    mutable std::mutex mutex_;
    std::vector<std::uint64_t> counters_;  // per-rule rotation position
};

}  // namespace refeed::lm
