#pragma once

// Shared front-end plumbing: file loading, import resolution, and the
// parse -> check -> elaborate pipeline used by the CLI and the test suites.

#include "ggv/elaborate.hpp"
#include "ggv/embed.hpp"
#include "ggv/parser.hpp"

namespace ggv {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);

struct LoadedProgram {
  Program program;
  TypeEnv import_env; // each import bound at Dyn
  std::vector<std::pair<std::string, EExprPtr>> imports; // name, parsed untyped body
  TypePtr type;       // check_program result
};

// Parses and typechecks a .ggv file, resolving `import untyped` declarations
// relative to the file's directory.
LoadedProgram load_typed_program(const std::string& path);
LoadedProgram load_typed_source(const std::string& source, const std::string& file);

// Elaborates the checked program; imports wrap the body as
// (lambda_lin name: Dyn. body) [embedded-import].
ITermPtr elaborate_program(const LoadedProgram& prog, LabelAllocator& labels);

// Parses and embeds a .ugv file.
ITermPtr load_untyped_program(const std::string& path, LabelAllocator& labels);
ITermPtr load_untyped_source(const std::string& source, const std::string& file,
                             LabelAllocator& labels);

} // namespace ggv
