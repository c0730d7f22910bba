// Exit-code contract of the command-line frontend. Takes the binary path as
// its single argument and exercises the error paths end to end.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "cade/image_io.hpp"
#include "cade/manifest.hpp"
#include "helpers.hpp"

namespace {

int failures = 0;

int run(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

void expect(const std::string& what, int got, int want) {
    const bool ok = got == want;
    std::printf("[%s] %s (exit %d, want %d)\n", ok ? "PASS" : "FAIL", what.c_str(), got, want);
    if (!ok) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli_exit_codes <cade-binary>\n";
        return 2;
    }
    const std::string cade = argv[1];
    testutil::TempDir dir("cli_exit");

    expect("unknown subcommand", run(cade + " frobnicate"), 64);
    expect("unknown flag", run(cade + " corrupt --manifest x --seed 1 --out-dir y --bogus"), 64);
    expect("missing required option", run(cade + " evaluate --manifest m.jsonl --out r.json"), 1);
    expect("no subcommand", run(cade), 64);

    // validation error: malformed manifest
    testutil::write_text(dir.file("bad.jsonl"), "{\"name\":\"x\",\"split\":\"Nope\",\"version\":1}\n");
    expect("bad manifest split",
           run(cade + " corrupt --manifest " + dir.file("bad.jsonl").string() +
               " --seed 1 --out-dir " + (dir.path / "out").string()),
           1);

    // io error: missing manifest file
    expect("missing manifest file",
           run(cade + " corrupt --manifest " + (dir.path / "nothere.jsonl").string() +
               " --seed 1 --out-dir " + (dir.path / "out").string()),
           2);

    // happy path: tiny corrupt run
    cade::DatasetManifest m;
    m.name = "tiny";
    m.split = cade::Split::Test;
    for (int i = 0; i < 2; ++i) {
        cade::SampleRecord r;
        r.id = "s" + std::to_string(i);
        r.patient_id = "P" + std::to_string(i);
        r.label = i;
        r.image_path = r.id + ".png";
        m.records.push_back(r);
        cade::write_rgb_png(testutil::gradient_image(32, 32, 40 + i), dir.file(r.id + ".png"));
    }
    cade::save_manifest(m, dir.file("tiny.jsonl"));
    expect("successful corrupt run",
           run(cade + " corrupt --manifest " + dir.file("tiny.jsonl").string() +
               " --seed 5 --replicates 2 --out-dir " + (dir.path / "out").string()),
           0);

    if (failures == 0) std::printf("all exit-code checks passed\n");
    return failures == 0 ? 0 : 1;
}
