#include "ggv/driver.hpp"

#include <fstream>
#include <sstream>

namespace ggv {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

static std::string dir_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string() : path.substr(0, pos + 1);
}

static LoadedProgram load_from(Program parsed, const std::string& base_dir) {
  LoadedProgram out;
  out.program = std::move(parsed);
  for (const auto& imp : out.program.imports) {
    std::string path = base_dir + imp.path;
    EExprPtr body = parse_untyped_expr(read_file(path), path);
    check_embedding(body); // embedding bugs surface here, not at run time
    out.imports.emplace_back(imp.name, body);
    out.import_env.push(imp.name, t_dyn());
  }
  out.type = check_program(out.program.body, out.import_env);
  return out;
}

LoadedProgram load_typed_program(const std::string& path) {
  return load_from(parse_program(read_file(path), path), dir_of(path));
}

LoadedProgram load_typed_source(const std::string& source, const std::string& file) {
  return load_from(parse_program(source, file), dir_of(file));
}

ITermPtr elaborate_program(const LoadedProgram& prog, LabelAllocator& labels) {
  TypeEnv env = prog.import_env;
  Elaborated main = insert_casts(env, prog.program.body, labels);
  ITermPtr term = main.term;
  // innermost import is applied first, mirroring declaration order
  for (auto it = prog.imports.rbegin(); it != prog.imports.rend(); ++it) {
    ITermPtr embedded = embed(it->second, labels);
    term = i_app(term->span, i_lam(term->span, Mult::lin, it->first, t_dyn(), term), embedded);
  }
  return term;
}

ITermPtr load_untyped_program(const std::string& path, LabelAllocator& labels) {
  return load_untyped_source(read_file(path), path, labels);
}

ITermPtr load_untyped_source(const std::string& source, const std::string& file,
                             LabelAllocator& labels) {
  EExprPtr body = parse_untyped_expr(source, file);
  check_embedding(body);
  return embed(body, labels);
}

} // namespace ggv
