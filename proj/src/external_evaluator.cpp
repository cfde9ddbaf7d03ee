#include "abdesign/external_evaluator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include <json.hpp>

#include "abdesign/errors.hpp"

namespace abdesign {

using nlohmann::json;

std::string make_request_line(std::uint64_t request_id, const CdrState& state) {
    json req;
    req["request_id"] = request_id;
    req["sequence"] = state.sequence();
    json coords = json::array();
    for (const auto& x : state.coords) coords.push_back({x.x(), x.y(), x.z()});
    req["ca_coords"] = std::move(coords);
    json orients = json::array();
    for (const auto& o : state.orients) {
        json flat = json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) flat.push_back(o(r, c));
        orients.push_back(std::move(flat));
    }
    req["orientations"] = std::move(orients);
    return req.dump();
}

WireResponse parse_response_line(const std::string& line) {
    json parsed;
    try {
        parsed = json::parse(line);
    } catch (const json::parse_error& e) {
        throw EvaluatorProtocolError(std::string("malformed response line: ") + e.what());
    }
    if (!parsed.is_object() || !parsed.contains("request_id") ||
        !parsed["request_id"].is_number())
        throw EvaluatorProtocolError("response missing numeric request_id");
    WireResponse out;
    out.request_id = parsed["request_id"].get<std::uint64_t>();
    if (parsed.contains("score")) {
        if (!parsed["score"].is_number())
            throw EvaluatorProtocolError("response score is not a number");
        out.has_score = true;
        out.score = parsed["score"].get<double>();
    } else if (parsed.contains("error")) {
        out.error = parsed["error"].get<std::string>();
    } else {
        throw EvaluatorProtocolError("response has neither score nor error");
    }
    return out;
}

namespace {

// Writing to a dead child must surface as EPIPE, not kill the process.
void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

ExternalEvaluator::ExternalEvaluator(std::vector<std::string> command, int timeout_ms,
                                     std::string name)
    : Evaluator(std::move(name)), command_(std::move(command)), timeout_ms_(timeout_ms) {
    if (command_.empty()) throw ConfigError("external evaluator: empty command line");
    ignore_sigpipe_once();
    spawn();
}

ExternalEvaluator::~ExternalEvaluator() { shutdown(); }

void ExternalEvaluator::spawn() {
    int in_pipe[2];   // parent -> child stdin
    int out_pipe[2];  // child stdout -> parent
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
        throw EvaluatorProcessError("external evaluator: pipe() failed");

    pid_t pid = ::fork();
    if (pid < 0) throw EvaluatorProcessError("external evaluator: fork() failed");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        std::vector<char*> argv;
        argv.reserve(command_.size() + 1);
        for (auto& arg : command_) argv.push_back(const_cast<char*>(arg.c_str()));
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    child_pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

void ExternalEvaluator::shutdown() noexcept {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (child_pid_ > 0) {
        int status = 0;
        if (::waitpid(child_pid_, &status, WNOHANG) == 0) {
            ::kill(child_pid_, SIGTERM);
            ::waitpid(child_pid_, &status, 0);
        }
        child_pid_ = -1;
    }
}

std::string ExternalEvaluator::read_line_with_timeout() {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
    while (true) {
        auto newline = read_buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = read_buffer_.substr(0, newline);
            read_buffer_.erase(0, newline + 1);
            return line;
        }

        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining <= 0)
            throw EvaluatorTimeout("external evaluator: no response within " +
                                   std::to_string(timeout_ms_) + " ms");

        struct pollfd pfd { from_child_, POLLIN, 0 };
        int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw EvaluatorProcessError("external evaluator: poll() failed");
        }
        if (ready == 0)
            throw EvaluatorTimeout("external evaluator: no response within " +
                                   std::to_string(timeout_ms_) + " ms");

        char chunk[4096];
        ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EvaluatorProcessError("external evaluator: read() failed");
        }
        if (n == 0) {
            int status = 0;
            ::waitpid(child_pid_, &status, 0);
            child_pid_ = -1;
            int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            throw EvaluatorProcessError("external evaluator: process exited (status " +
                                        std::to_string(code) + ") before responding");
        }
        read_buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

double ExternalEvaluator::evaluate_impl(const CdrState& state) {
    if (child_pid_ <= 0)
        throw EvaluatorProcessError("external evaluator: process is not running");

    const std::uint64_t id = next_request_id_++;
    std::string line = make_request_line(id, state);
    line.push_back('\n');
    std::size_t written = 0;
    while (written < line.size()) {
        ssize_t n = ::write(to_child_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EvaluatorProcessError("external evaluator: write failed (" +
                                        std::string(std::strerror(errno)) + ")");
        }
        written += static_cast<std::size_t>(n);
    }

    WireResponse resp = parse_response_line(read_line_with_timeout());
    if (resp.request_id != id)
        throw EvaluatorProtocolError("external evaluator: response id " +
                                     std::to_string(resp.request_id) +
                                     " does not match request id " + std::to_string(id));
    if (!resp.has_score)
        throw EvaluatorError("external evaluator reported: " + resp.error);
    // External scores are lower-better; rewards are higher-better.
    return -resp.score;
}

}  // namespace abdesign
