/*
 * Copyright 2026 the paratune authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "paratune/scheduler.hpp"

namespace paratune::internal {
namespace {

void ignore_sigpipe_once() {
  static const bool installed = [] {
    struct sigaction action {};
    action.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &action, nullptr);
    return true;
  }();
  (void)installed;
}

[[noreturn]] void child_exec(const std::vector<std::string>& argv,
                             int stdin_read, int stdout_write,
                             int status_write) {
  if (dup2(stdin_read, STDIN_FILENO) < 0 ||
      dup2(stdout_write, STDOUT_FILENO) < 0) {
    _exit(127);
  }
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& arg : argv) {
    args.push_back(const_cast<char*>(arg.c_str()));
  }
  args.push_back(nullptr);
  execvp(args[0], args.data());
  // Exec failed: report errno to the parent through the CLOEXEC pipe.
  const int code = errno;
  ssize_t ignored = write(status_write, &code, sizeof(code));
  (void)ignored;
  _exit(127);
}

}  // namespace

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> words;
  std::string current;
  bool in_word = false;
  char quote = '\0';
  for (char c : command) {
    if (quote != '\0') {
      if (c == quote) {
        quote = '\0';
      } else {
        current.push_back(c);
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) {
        words.push_back(std::move(current));
        current.clear();
        in_word = false;
      }
    } else {
      current.push_back(c);
      in_word = true;
    }
  }
  if (quote != '\0') {
    throw SchedulerError("worker command has an unterminated quote");
  }
  if (in_word) {
    words.push_back(std::move(current));
  }
  if (words.empty()) {
    throw SchedulerError("worker command is empty");
  }
  return words;
}

ChildProcess spawn_process(const std::vector<std::string>& argv) {
  ignore_sigpipe_once();

  int to_child[2];   // parent writes -> child stdin
  int from_child[2]; // child stdout -> parent reads
  int status[2];     // exec-failure report
  if (pipe(to_child) < 0) {
    throw SchedulerError("pipe failed: " + std::string(std::strerror(errno)));
  }
  if (pipe(from_child) < 0) {
    const int saved = errno;
    close(to_child[0]);
    close(to_child[1]);
    throw SchedulerError("pipe failed: " + std::string(std::strerror(saved)));
  }
  if (pipe(status) < 0) {
    const int saved = errno;
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    throw SchedulerError("pipe failed: " + std::string(std::strerror(saved)));
  }
  fcntl(status[1], F_SETFD, FD_CLOEXEC);

  const pid_t pid = fork();
  if (pid < 0) {
    const int saved = errno;
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1],
                   status[0], status[1]}) {
      close(fd);
    }
    throw SchedulerError("fork failed: " + std::string(std::strerror(saved)));
  }
  if (pid == 0) {
    close(to_child[1]);
    close(from_child[0]);
    close(status[0]);
    child_exec(argv, to_child[0], from_child[1], status[1]);
  }

  close(to_child[0]);
  close(from_child[1]);
  close(status[1]);

  // A successful exec closes the status pipe without writing; a failed one
  // sends errno.
  int exec_errno = 0;
  const ssize_t n = read(status[0], &exec_errno, sizeof(exec_errno));
  close(status[0]);
  if (n > 0) {
    close(to_child[1]);
    close(from_child[0]);
    int ignored;
    waitpid(pid, &ignored, 0);
    throw SchedulerError("worker failed to start ('" + argv[0] +
                         "'): " + std::strerror(exec_errno));
  }

  ChildProcess child;
  child.pid = pid;
  child.stdin_fd = to_child[1];
  child.stdout_fd = from_child[0];
  return child;
}

void close_fd(int& fd) {
  if (fd >= 0) {
    close(fd);
    fd = -1;
  }
}

bool wait_exit(ChildProcess& child, std::chrono::milliseconds timeout,
               int* status) {
  if (!child.running()) {
    return true;
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    int raw = 0;
    const pid_t r = waitpid(child.pid, &raw, WNOHANG);
    if (r == child.pid || r < 0) {
      if (status != nullptr) {
        *status = raw;
      }
      child.pid = -1;
      return true;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      return false;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

void terminate_process(ChildProcess& child, std::chrono::milliseconds grace) {
  close_fd(child.stdin_fd);
  close_fd(child.stdout_fd);
  if (!child.running()) {
    return;
  }
  if (wait_exit(child, grace)) {
    return;
  }
  kill(child.pid, SIGTERM);
  if (wait_exit(child, grace)) {
    return;
  }
  kill(child.pid, SIGKILL);
  int ignored = 0;
  waitpid(child.pid, &ignored, 0);
  child.pid = -1;
}

}  // namespace paratune::internal
