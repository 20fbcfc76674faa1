#pragma once

// Entry point of the `vdn` command-line tool, callable from tests.
// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int cli_main(int argc, char** argv);
