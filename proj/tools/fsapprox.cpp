// Command-line driver: compiles context-free and feature grammars into
// sound finite-state approximations, and provides small verification and
// inspection utilities around the same library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsapprox/fsapprox.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fsapprox::Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "-" writes to stdout; otherwise write a sibling temp file and rename
// it into place, so failures never leave a partial output file.
void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp(path + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fsapprox::Error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw fsapprox::Error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw fsapprox::Error("cannot move output into place at '" + path +
                              "'");
    }
}

bool is_apsg(const std::string& path) {
    return std::filesystem::path(path).extension() == ".apsg";
}

fsapprox::Grammar load_grammar(const std::string& path) {
    std::string text = read_file(path);
    auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".apsg") return instantiate(fsapprox::parse_apsg(text));
    if (ext == ".cfg") return fsapprox::parse_cfg(text);
    throw fsapprox::Error("cannot tell the grammar kind of '" + path +
                          "' (expected a .cfg or .apsg extension)");
}

std::vector<std::string> tokenize(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& a : args) {
        std::istringstream ss(a);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
    }
    return out;
}

std::string join(const std::vector<std::string>& tokens) {
    if (tokens.empty()) return "\xce\xb5";  // ε, the empty sentence
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string default_output(const std::string& input, const char* ext) {
    std::filesystem::path p(input);
    p.replace_extension(ext);
    return p.string();
}

struct PipelineFlags {
    bool no_decompose = false;
    bool no_unfold = false;
    bool no_minimize = false;
    long max_unfolded_states = fsapprox::default_stack_cap;

    void attach(CLI::App* cmd) {
        cmd->add_flag("--no-decompose", no_decompose,
                      "approximate the whole grammar at once instead of "
                      "per strongly connected component");
        cmd->add_flag("--no-unfold", no_unfold,
                      "skip stack unfolding (implies --no-decompose, for "
                      "a whole-grammar flat approximation)");
        cmd->add_flag("--no-minimize", no_minimize,
                      "skip the final DFA minimization");
        cmd->add_option("--max-unfolded-states", max_unfolded_states,
                        "cap on canonical stacks per component")
            ->capture_default_str();
    }

    fsapprox::CompileOptions options() const {
        fsapprox::CompileOptions opt;
        opt.decompose = !no_decompose && !no_unfold;
        opt.unfold = !no_unfold;
        opt.minimize_final = !no_minimize;
        opt.max_unfolded_states = max_unfolded_states;
        return opt;
    }
};

void print_stats(const fsapprox::Grammar& g, bool instantiated,
                 const fsapprox::CompileStats& st) {
    std::ostream& os = std::cerr;
    os << (instantiated ? "instantiated grammar: " : "grammar: ")
       << g.nonterminals.size() << " nonterminals, " << g.rules.size()
       << " rules\n";
    os << "pruned grammar: " << st.pruned_nonterminals << " nonterminals, "
       << st.pruned_rules << " rules\n";
    os << "components: " << st.components << " (automata built: "
       << st.automata_built << ", unfolded nontrivially: "
       << st.components_unfolded << ")\n";
    os << "lr0 states: " << st.lr0_states << "\n";
    os << "unfolded states: " << st.unfolded_states << "\n";
    os << "nfa: " << st.nfa_states << " states, " << st.nfa_transitions
       << " transitions\n";
    os << "dfa: " << st.dfa_states << " states, " << st.dfa_transitions
       << " transitions\n";
    os << "stages:";
    char buf[64];
    for (const auto& [name, secs] : st.stage_seconds) {
        std::snprintf(buf, sizeof buf, " %s %.3fs", name.c_str(), secs);
        os << buf;
    }
    os << "\n";
    for (const auto& w : st.warnings) os << "warning: " << w << "\n";
}

int cmd_compile(const std::string& input, std::string output,
                const std::string& format, bool stats,
                const PipelineFlags& flags) {
    fsapprox::Grammar g = load_grammar(input);
    fsapprox::CompileStats st;
    fsapprox::Dfa dfa = fsapprox::compile(g, flags.options(), &st);
    if (output.empty())
        output = default_output(input, format == "dot" ? ".dot" : ".fsa");
    write_output(output, format == "dot" ? fsapprox::to_dot(dfa)
                                         : fsapprox::format_fsa(dfa));
    if (stats) print_stats(g, is_apsg(input), st);
    return 0;
}

int cmd_check(const std::string& input, long max_len,
              const PipelineFlags& flags) {
    fsapprox::Grammar g = load_grammar(input);
    fsapprox::Dfa dfa = fsapprox::compile(g, flags.options());
    auto language =
        fsapprox::oracle::enumerate_language(g, static_cast<int>(max_len));
    for (const auto& word : language) {
        if (!fsapprox::accepts(dfa, word)) {
            std::cout << "UNSOUND; witness: " << join(word) << "\n";
            return 5;
        }
    }
    fsapprox::Dfa trie = fsapprox::dfa_from_strings(language, dfa.alphabet);
    auto extra = fsapprox::bounded_difference(dfa, trie, max_len);
    if (extra) {
        std::cout << "sound, overaccepts; witness: " << join(*extra) << "\n";
    } else {
        std::cout << "exact \xe2\x89\xa4 " << max_len << "\n";  // ≤
    }
    return 0;
}

int cmd_instantiate(const std::string& input, std::string output) {
    fsapprox::Grammar g = load_grammar(input);
    if (output.empty()) output = default_output(input, ".cfg");
    if (output == input)
        throw fsapprox::Error("refusing to overwrite the input file '" +
                              input + "'");
    write_output(output, fsapprox::format_cfg(g));
    return 0;
}

int cmd_member(const std::string& input,
               const std::vector<std::string>& sentence) {
    fsapprox::Grammar g = load_grammar(input);
    std::cout << (fsapprox::oracle::member(g, tokenize(sentence)) ? "true"
                                                                  : "false")
              << "\n";
    return 0;
}

int cmd_enumerate(const std::string& input, long max_len) {
    fsapprox::Grammar g = load_grammar(input);
    for (const auto& word : fsapprox::oracle::enumerate_language(
             g, static_cast<int>(max_len)))
        std::cout << join(word) << "\n";
    return 0;
}

int cmd_accepts(const std::string& input,
                const std::vector<std::string>& sentence) {
    fsapprox::Nfa n = fsapprox::parse_fsa(read_file(input));
    std::cout << (fsapprox::accepts(n, tokenize(sentence)) ? "true" : "false")
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fsapprox: compile context-free and feature grammars into sound "
        "finite-state approximations"};
    app.require_subcommand(1);

    auto* compile = app.add_subcommand(
        "compile", "compile a grammar (.cfg or .apsg) into a DFA");
    std::string compile_in, compile_out;
    std::string compile_format = "fsa";
    bool compile_stats = false;
    PipelineFlags compile_flags;
    compile->add_option("grammar", compile_in, "input grammar file")
        ->required();
    compile->add_option("-o,--output", compile_out,
                        "output path; '-' for stdout (default: input with "
                        "the format's extension)");
    compile->add_option("--format", compile_format, "output format")
        ->check(CLI::IsMember({"fsa", "dot"}))
        ->capture_default_str();
    compile->add_flag("--stats", compile_stats,
                      "print pipeline statistics to stderr");
    compile_flags.attach(compile);

    auto* check = app.add_subcommand(
        "check",
        "compile, then verify soundness and bounded exactness against the "
        "grammar itself");
    std::string check_in;
    long check_max_len = 8;
    PipelineFlags check_flags;
    check->add_option("grammar", check_in, "input grammar file")->required();
    check->add_option("--max-len", check_max_len,
                      "verify on all sentences up to this length")
        ->capture_default_str();
    check_flags.attach(check);

    auto* inst = app.add_subcommand(
        "instantiate",
        "expand a feature grammar (.apsg) into a plain context-free "
        "grammar");
    std::string inst_in, inst_out;
    inst->add_option("grammar", inst_in, "input grammar file")->required();
    inst->add_option("-o,--output", inst_out,
                     "output path; '-' for stdout (default: input with a "
                     ".cfg extension)");

    auto* member = app.add_subcommand(
        "member", "decide grammar membership of a sentence (exact parser)");
    std::string member_in;
    std::vector<std::string> member_sentence;
    member->add_option("grammar", member_in, "input grammar file")->required();
    member
        ->add_option("sentence", member_sentence,
                     "sentence tokens (whitespace-separated words)")
        ->expected(-1);

    auto* enumerate = app.add_subcommand(
        "enumerate", "list every sentence of the grammar up to a length");
    std::string enum_in;
    long enum_max_len = 5;
    enumerate->add_option("grammar", enum_in, "input grammar file")
        ->required();
    enumerate
        ->add_option("--max-len", enum_max_len, "maximum sentence length")
        ->capture_default_str();

    auto* accepts = app.add_subcommand(
        "accepts", "test whether a compiled FSA accepts a sentence");
    std::string accepts_in;
    std::vector<std::string> accepts_sentence;
    accepts->add_option("fsa", accepts_in, "FSA text-format file")
        ->required();
    accepts
        ->add_option("sentence", accepts_sentence,
                     "sentence tokens (whitespace-separated words)")
        ->expected(-1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compile)
            return cmd_compile(compile_in, compile_out, compile_format,
                               compile_stats, compile_flags);
        if (*check) return cmd_check(check_in, check_max_len, check_flags);
        if (*inst) return cmd_instantiate(inst_in, inst_out);
        if (*member) return cmd_member(member_in, member_sentence);
        if (*enumerate) return cmd_enumerate(enum_in, enum_max_len);
        if (*accepts) return cmd_accepts(accepts_in, accepts_sentence);
    } catch (const fsapprox::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fsapprox::SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fsapprox::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
