//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each operation takes the text of an `.eds` file and returns the exit code
//! the command-line tool would give together with its report.

use cartan::cli::{self, Command, Options};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Output {
    code: i32,
    text: String,
}

#[wasm_bindgen]
impl Output {
    /// 0 computed, 1 domain error, 2 parse error.
    #[wasm_bindgen(getter)]
    pub fn code(&self) -> i32 {
        self.code
    }

    #[wasm_bindgen(getter)]
    pub fn text(&self) -> String {
        self.text.clone()
    }
}

fn run(command: Command, source: &str, opts: Options) -> Output {
    let out = cli::run(command, source, &opts);
    Output {
        code: out.code,
        text: out.stdout,
    }
}

#[wasm_bindgen(js_name = cartanTest)]
pub fn cartan_test(source: &str, json: bool) -> Output {
    run(
        Command::CartanTest,
        source,
        Options {
            json,
            ..Options::default()
        },
    )
}

/// With `solve_for`, also restricts to the zero set of the first torsion
/// entry and reruns the test there.
#[wasm_bindgen]
pub fn torsion(source: &str, solve_for: Option<String>, json: bool) -> Output {
    let solve_for = solve_for.filter(|s| !s.trim().is_empty()).map(|s| s.trim().to_string());
    run(
        Command::Torsion,
        source,
        Options {
            json,
            solve_for,
            ..Options::default()
        },
    )
}

#[wasm_bindgen]
pub fn charvar(source: &str, json: bool) -> Output {
    run(
        Command::Charvar,
        source,
        Options {
            json,
            ..Options::default()
        },
    )
}

const EXAMPLES: [(&str, &str); 5] = [
    ("harmonic", include_str!("../../core/fixtures/harmonic.eds")),
    ("webs", include_str!("../../core/fixtures/webs.eds")),
    ("immersion", include_str!("../../core/fixtures/immersion.eds")),
    (
        "immersion-prolonged",
        include_str!("../../core/fixtures/immersion-prolonged.eds"),
    ),
    ("frobenius", include_str!("../../core/fixtures/frobenius.eds")),
];

#[wasm_bindgen(js_name = exampleNames)]
pub fn example_names() -> Vec<String> {
    EXAMPLES.iter().map(|(n, _)| n.to_string()).collect()
}

#[wasm_bindgen]
pub fn example(name: &str) -> Option<String> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string())
}
