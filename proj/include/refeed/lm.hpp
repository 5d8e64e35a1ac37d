#pragma once

#include <optional>
#include <string>
#include <vector>

namespace refeed::lm {

enum class DecodeMode { greedy, nucleus };

struct DecodeParams {
    DecodeMode mode = DecodeMode::greedy;
    double top_p = 0.95;       // nucleus only
    double temperature = 1.0;  // nucleus only
    int max_tokens = 256;
    std::vector<std::string> stop_sequences;
};

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;  // always <= 0
};

enum class FinishReason { stop, length, other };

struct Generation {
    std::string text;
    // When present, joining the tokens reconstructs text modulo the
    // backend's whitespace conventions (documented per backend).
    std::optional<std::vector<TokenLogprob>> token_logprobs;
    FinishReason finish_reason = FinishReason::stop;
};

struct BackendCapabilities {
    bool supports_logprobs = false;
    bool supports_sampling = false;
    int max_context_tokens = 1;
};

struct ScoredCompletion {
    double mean_logprob = 0.0;  // mean over completion tokens, <= 0
    int num_tokens = 0;         // >= 1
};

/// Uniform interface over text-generation backends. Implementations are safe
/// to call from many threads concurrently.
class LmBackend {
public:
    virtual ~LmBackend() = default;

    /// One completion. Greedy mode is deterministic per backend+prompt.
    /// Throws ContextOverflowError when the prompt exceeds the context
    /// window (backend-estimated), BackendError on transport failures.
    virtual Generation generate(const std::string& prompt, const DecodeParams& params) = 0;

    /// Exactly n generations; requires supports_sampling and nucleus mode.
    virtual std::vector<Generation> sample_n(const std::string& prompt, int n,
                                             const DecodeParams& params) = 0;

    /// Mean log-probability of `completion` given `prompt`, and the token
    /// count it was averaged over. Requires supports_logprobs and a
    /// non-empty completion.
    virtual ScoredCompletion score_completion(const std::string& prompt,
                                              const std::string& completion) = 0;

    virtual BackendCapabilities capabilities() const = 0;
    virtual std::string name() const = 0;
};

}  // namespace refeed::lm
