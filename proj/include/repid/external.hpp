#ifndef REPID_EXTERNAL_HPP
#define REPID_EXTERNAL_HPP

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "repid/dataset.hpp"

namespace repid {

// Black-box predictor protocol. File mode: evaluation points are written as
// CSV to points_path and predictions are read from preds_path once its
// terminating "#done" line appears. Exec mode: the command receives the same
// CSV on stdin and must answer with one decimal per row on stdout.
struct ExternalFileMode {
    std::string points_path;
    std::string preds_path;
};
struct ExternalExecMode {
    std::string command;
};

struct ExternalSpec {
    std::variant<ExternalFileMode, ExternalExecMode> mode;
    double timeout_seconds = 30.0;

    void validate() const {
        if (const auto* f = std::get_if<ExternalFileMode>(&mode)) {
            if (f->points_path.empty() || f->preds_path.empty())
                throw_predictor("external: file paths must be non-empty");
        } else {
            if (std::get<ExternalExecMode>(mode).command.empty())
                throw_predictor("external: command must be non-empty");
        }
    }
};

namespace detail {

inline std::string points_csv(const Matrix& rows,
                              const std::vector<FeatureMeta>& metas) {
    std::string out;
    for (std::size_t j = 0; j < rows.cols(); ++j) {
        if (j) out.push_back(',');
        out += j < metas.size() ? csv_quote(metas[j].name)
                                : "x" + std::to_string(j + 1);
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        for (std::size_t j = 0; j < rows.cols(); ++j) {
            if (j) out.push_back(',');
            if (j < metas.size() && metas[j].kind == FeatureKind::categorical) {
                const auto idx = static_cast<std::size_t>(rows(i, j));
                out += csv_quote(metas[j].levels[idx]);
            } else {
                out += format_double(rows(i, j));
            }
        }
        out.push_back('\n');
    }
    return out;
}

inline std::vector<double> parse_prediction_lines(const std::string& text,
                                                  std::size_t expected,
                                                  bool skip_header_and_done) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();

    if (skip_header_and_done) {
        if (lines.size() < 2 || lines.front() != "prediction" || lines.back() != "#done")
            throw_predictor("external: predictions file must be 'prediction' header, "
                            "values, then '#done'");
        lines.erase(lines.begin());
        lines.pop_back();
    }

    if (lines.size() != expected)
        throw_predictor("external: expected " + std::to_string(expected) +
                        " predictions, got " + std::to_string(lines.size()));
    std::vector<double> preds(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto v = parse_double(lines[i]);
        if (!v || !std::isfinite(*v))
            throw_predictor("external: unparsable prediction line " +
                            std::to_string(i + 1) + ": '" + lines[i] + "'");
        preds[i] = *v;
    }
    return preds;
}

inline std::vector<double> run_exec_protocol(const std::string& command,
                                             const std::string& input,
                                             std::size_t expected,
                                             double timeout_seconds) {
    static const bool sigpipe_ignored = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;

    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw_predictor("external: pipe() failed");

    const pid_t pid = fork();
    if (pid < 0) throw_predictor("external: fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(timeout_seconds);
    std::string output;
    std::size_t written = 0;
    bool stdin_open = true, stdout_open = true;
    char buf[16384];

    while (stdin_open || stdout_open) {
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            close(out_pipe[0]);
            if (stdin_open) close(in_pipe[1]);
            throw_predictor("external: timeout after command '" + command + "'");
        }
        pollfd fds[2];
        nfds_t nfds = 0;
        int out_idx = -1, in_idx = -1;
        if (stdout_open) {
            out_idx = static_cast<int>(nfds);
            fds[nfds++] = {out_pipe[0], POLLIN, 0};
        }
        if (stdin_open) {
            in_idx = static_cast<int>(nfds);
            fds[nfds++] = {in_pipe[1], POLLOUT, 0};
        }
        if (poll(fds, nfds, static_cast<int>(std::min<long long>(remaining.count(), 200))) < 0) {
            if (errno == EINTR) continue;
            throw_predictor("external: poll() failed");
        }
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
            const ssize_t got = read(out_pipe[0], buf, sizeof(buf));
            if (got > 0)
                output.append(buf, static_cast<std::size_t>(got));
            else if (got == 0 || (got < 0 && errno != EAGAIN && errno != EINTR)) {
                close(out_pipe[0]);
                stdout_open = false;
            }
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
                close(in_pipe[1]);
                stdin_open = false;
            } else {
                const ssize_t put = write(in_pipe[1], input.data() + written,
                                          std::min<std::size_t>(input.size() - written, 16384));
                if (put > 0) written += static_cast<std::size_t>(put);
                else if (put < 0 && errno != EAGAIN && errno != EINTR) {
                    close(in_pipe[1]);
                    stdin_open = false;
                }
                if (written == input.size() && stdin_open) {
                    close(in_pipe[1]);
                    stdin_open = false;
                }
            }
        }
    }

    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw_predictor("external: command '" + command + "' failed with status " +
                        std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    return parse_prediction_lines(output, expected, /*skip_header_and_done=*/false);
}

inline std::vector<double> run_file_protocol(const ExternalFileMode& mode,
                                             const std::string& points,
                                             std::size_t expected,
                                             double timeout_seconds) {
    {
        std::ofstream out(mode.points_path, std::ios::binary | std::ios::trunc);
        if (!out) throw_predictor("external: cannot write " + mode.points_path);
        out << points;
    }
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(timeout_seconds);
    while (true) {
        {
            std::ifstream in(mode.preds_path, std::ios::binary);
            if (in) {
                std::stringstream ss;
                ss << in.rdbuf();
                std::string text = ss.str();
                // Completion is signalled by the sentinel as the final line;
                // earlier polls may observe a partially written file.
                std::string_view view = text;
                while (!view.empty() && (view.back() == '\n' || view.back() == '\r'))
                    view.remove_suffix(1);
                if (view.ends_with("#done"))
                    return parse_prediction_lines(text, expected,
                                                  /*skip_header_and_done=*/true);
            }
        }
        if (std::chrono::steady_clock::now() >= deadline)
            throw_predictor("external: timeout waiting for " + mode.preds_path);
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

}  // namespace detail

// Runs one evaluation batch through the external protocol. Calls on a single
// spec must be serialized by the caller.
inline std::vector<double> predict_external(const ExternalSpec& spec,
                                            const Matrix& rows,
                                            const std::vector<FeatureMeta>& metas) {
    spec.validate();
    const std::string points = detail::points_csv(rows, metas);
    if (const auto* exec_mode = std::get_if<ExternalExecMode>(&spec.mode))
        return detail::run_exec_protocol(exec_mode->command, points, rows.rows(),
                                         spec.timeout_seconds);
    return detail::run_file_protocol(std::get<ExternalFileMode>(spec.mode), points,
                                     rows.rows(), spec.timeout_seconds);
}

}  // namespace repid

#endif  // REPID_EXTERNAL_HPP
