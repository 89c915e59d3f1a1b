#pragma once

namespace gspt::cli {

/// Entry point of the `gspt` tool; returns 0 on success, 2 on config errors, 3 on computation errors.
int run_cli(int argc, char** argv);

}  // namespace gspt::cli
