#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace morphlex::cli;
    CLI::App app{"morphlex: morphology-aware bilingual lexicon induction"};
    app.name("morphlex");
    app.option_defaults()->always_capture_default();
    auto commands = register_commands(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }
    for (const auto& command : commands) {
        if (!command.app->parsed()) continue;
        try {
            command.run();
            return kOk;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_code_for(e);
        }
    }
    return kUsage;
}
