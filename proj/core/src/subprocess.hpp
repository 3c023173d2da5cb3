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

// POSIX child-process plumbing for the worker-protocol scheduler. Not part
// of the installed interface.

#pragma once

#include <sys/types.h>

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace paratune::internal {

struct ChildProcess {
  pid_t pid = -1;
  int stdin_fd = -1;   // write side of the child's stdin
  int stdout_fd = -1;  // read side of the child's stdout

  bool running() const { return pid > 0; }
};

/// Splits a command line on unquoted whitespace; single and double quotes
/// group words and are stripped. Throws SchedulerError on an unterminated
/// quote or an empty command.
std::vector<std::string> split_command(std::string_view command);

/// Forks and execs argv with stdin/stdout piped. Throws SchedulerError when
/// the pipe/fork fails or the exec itself fails (reported through a
/// close-on-exec status pipe, so a bad executable is caught here, not
/// later). Installs a one-time SIGPIPE ignore so writes to dead children
/// error with EPIPE instead of killing the parent.
ChildProcess spawn_process(const std::vector<std::string>& argv);

/// Closes a descriptor if open and marks it closed.
void close_fd(int& fd);

/// Waits up to `grace` for the child to exit on its own, then escalates to
/// SIGTERM and finally SIGKILL. Reaps the child and closes both pipe ends.
void terminate_process(ChildProcess& child, std::chrono::milliseconds grace);

/// Waits up to `timeout` for the child to exit. On exit, reaps it, stores
/// the raw wait status when requested, and returns true; on timeout the
/// child keeps running and false is returned.
bool wait_exit(ChildProcess& child, std::chrono::milliseconds timeout,
               int* status = nullptr);

}  // namespace paratune::internal
