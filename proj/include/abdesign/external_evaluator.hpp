#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abdesign/evaluators.hpp"

namespace abdesign {

/// Build one wire-protocol request line (no trailing newline):
///   {"request_id": <uint64>, "sequence": "<m letters>",
///    "ca_coords": [[x,y,z] x m], "orientations": [[9 row-major reals] x m]}
/// Reals are serialized with full round-trip precision.
std::string make_request_line(std::uint64_t request_id, const CdrState& state);

struct WireResponse {
    std::uint64_t request_id = 0;
    bool has_score = false;
    double score = 0.0;
    std::string error;
};

/// Parse one response line:
///   {"request_id": <uint64>, "score": <real>}
///   {"request_id": <uint64>, "error": "<message>"}
/// Throws EvaluatorProtocolError on malformed input.
WireResponse parse_response_line(const std::string& line);

/// Property evaluator backed by a child process speaking the line-delimited
/// protocol over its standard streams: one request per line on stdin, one
/// response per line on stdout, UTF-8, responses in request order. The
/// returned reward is the negated score (external scores are lower-better).
///
/// One handle keeps a single request in flight; concurrent candidate
/// evaluation needs a pool of handles. Failure cases are distinct exception
/// types: EvaluatorTimeout, EvaluatorProtocolError (malformed response or id
/// mismatch), EvaluatorProcessError (spawn failure, death, nonzero exit).
/// A failed call still counts one query.
class ExternalEvaluator final : public Evaluator {
public:
    explicit ExternalEvaluator(std::vector<std::string> command, int timeout_ms = 30000,
                               std::string name = "external");
    ~ExternalEvaluator() override;

    ExternalEvaluator(const ExternalEvaluator&) = delete;
    ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

protected:
    double evaluate_impl(const CdrState& state) override;

private:
    void spawn();
    void shutdown() noexcept;
    std::string read_line_with_timeout();

    std::vector<std::string> command_;
    int timeout_ms_;
    std::uint64_t next_request_id_ = 1;
    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string read_buffer_;
};

}  // namespace abdesign
