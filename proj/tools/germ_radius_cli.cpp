#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <germ_radius/germ_radius.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Composite power series: recovery, Jacobian invariants and radius bounds"};
    app.name("germ-radius");

    std::string command;
    std::string job_path;
    std::string out_dir;
    std::optional<unsigned> degree;
    std::optional<unsigned> window;
    bool trace = false;

    app.add_option("command", command, "compose | recover | profile | stratify | radius | verify")
        ->required()
        ->check(CLI::IsMember({"compose", "recover", "profile", "stratify", "radius", "verify"}));
    app.add_option("--job", job_path, "job file (JSON)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--degree", degree, "override the job's working truncation degree");
    app.add_option("--window", window, "trailing shell window for radius estimates");
    app.add_flag("--trace", trace, "include the per-beta extraction trace in recovery reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        using namespace germ_radius;
        JobSpec job = load_job(job_path);
        JobOutput out = run(job, command_from_string(command), RunOptions{degree, window, trace});
        write_output(out, out_dir);
        for (const auto& [file, contents] : out.files)
            std::cout << (std::filesystem::path(out_dir) / file).string() << "\n";
        if (out.exit_code != 0) std::cerr << "germ-radius: verification failed\n";
        return out.exit_code;
    } catch (const germ_radius::Error& e) {
        std::cerr << "germ-radius: " << e.what() << "\n";
        return e.kind() == germ_radius::ErrorKind::kDomain ? 1 : 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "germ-radius: [cli] malformed job field: " << e.what() << "\n";
        return 2;
    }
}
