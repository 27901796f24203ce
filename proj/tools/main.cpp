// Copyright 2026 The tilesparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>

#include "cli_common.hpp"

int main(int argc, char** argv) {
  using namespace tilesparse;
  CLI::App app{"tilesparse: sparse kernel benchmarks, oracle checks, corpus analysis and "
               "scheduler simulation"};
  app.require_subcommand(1);
  cli::Action action;
  cli::register_bench(app, action);
  cli::register_ablate(app, action);
  cli::register_check(app, action);
  cli::register_analyze(app, action);
  cli::register_simulate(app, action);
  cli::register_attention_bench(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  try {
    return action();
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kIo;
  } catch (const Error& e) {
    // Shape, configuration and overflow problems all stem from the flags.
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kCheckFailed;
  }
}
