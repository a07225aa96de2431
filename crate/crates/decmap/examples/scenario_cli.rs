//! Drive the command-line interface from a scenario file.
//!
//! Scenario files (see `scenarios/` at the workspace root and
//! `docs/scenario.schema.json`) name the objects; each subcommand picks one
//! and emits a deterministic report. This example runs `classify-map`
//! against the bundled scenarios exactly as `decmap` the binary would.
//!
//! ```bash
//! cargo run --release --example scenario_cli
//! # equivalent to:
//! # cargo run --release --bin decmap -- classify-map scenarios/maps.json \
//! #     --object transpose --seed 1 --format machine
//! ```

fn main() {
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/maps.json");
    for object in ["amplitude_damping", "transpose", "choi_map"] {
        println!("--- classify-map --object {object}");
        let code = decmap::cli::run_from([
            "decmap",
            "classify-map",
            scenario,
            "--object",
            object,
            "--seed",
            "1",
            "--format",
            "machine",
        ]);
        println!("exit code: {code} (0 = decomposable, 1 = certified not)\n");
    }
}
