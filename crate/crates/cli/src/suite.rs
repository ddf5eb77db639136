//! The full acceptance suite: the eleven core checks plus the figure
//! goldens, and the opt-in large-grid performance check.

use std::time::Instant;

use sandlab_core::graph::{generate, Family};
use sandlab_core::sandpile;
use sandlab_core::verify::{run_core_criteria, CheckReport};

use crate::render::{render_config, Palette};

const GRID128_GOLDEN: &[u8] = include_bytes!("../tests/goldens/grid128_identity.ppm");
const TORUS100_GOLDEN: &[u8] = include_bytes!("../tests/goldens/torus100_identity.ppm");

/// Criterion 12: the identity figures render deterministically and match
/// the stored goldens byte for byte.
pub fn criterion_12() -> CheckReport {
    let start = Instant::now();
    let outcome = (|| -> Result<String, String> {
        let g = generate(&Family::GridWired(128));
        let ident = sandpile::identity(&g).map_err(|e| e.to_string())?;
        let first = render_config(&g, &ident, Palette::Grid4, 1)?.to_ppm();
        let again = render_config(
            &g,
            &sandpile::identity(&g).map_err(|e| e.to_string())?,
            Palette::Grid4,
            1,
        )?
        .to_ppm();
        if first != again {
            return Err("grid identity render is not deterministic".into());
        }
        if first != GRID128_GOLDEN {
            return Err("grid128 render differs from the golden file".into());
        }

        let g = generate(&Family::DirectedTorus(100));
        let ident = sandpile::identity(&g).map_err(|e| e.to_string())?;
        let torus = render_config(&g, &ident, Palette::Torus2, 1)?.to_ppm();
        if torus != TORUS100_GOLDEN {
            return Err("torus100 render differs from the golden file".into());
        }
        Ok("grid128 and torus100 identities match the goldens byte-exactly".into())
    })();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(details) => CheckReport {
            id: 12,
            name: "figure goldens",
            passed: true,
            details,
            seconds,
            budget_seconds: 120.0,
        },
        Err(details) => CheckReport {
            id: 12,
            name: "figure goldens",
            passed: false,
            details,
            seconds,
            budget_seconds: 120.0,
        },
    }
}

/// Opt-in part of criterion 12: the 521-grid identity completes within the
/// 30-minute budget.
pub fn criterion_12_full() -> CheckReport {
    let start = Instant::now();
    let outcome = (|| -> Result<String, String> {
        let g = generate(&Family::GridWired(521));
        let ident = sandpile::identity(&g).map_err(|e| e.to_string())?;
        if !ident.is_stable(&g) {
            return Err("identity is not stable".into());
        }
        let img = render_config(&g, &ident, Palette::Grid4, 1)?;
        Ok(format!(
            "grid521 identity computed and rendered ({}x{})",
            img.width, img.height
        ))
    })();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(details) => CheckReport {
            id: 12,
            name: "grid521 identity (opt-in)",
            passed: seconds <= 1800.0,
            details,
            seconds,
            budget_seconds: 1800.0,
        },
        Err(details) => CheckReport {
            id: 12,
            name: "grid521 identity (opt-in)",
            passed: false,
            details,
            seconds,
            budget_seconds: 1800.0,
        },
    }
}

/// Runs the whole suite, printing one pass/fail line per criterion;
/// returns overall success.
pub fn run_and_print(full: bool) -> bool {
    let mut all = run_core_criteria();
    all.push(criterion_12());
    if full {
        all.push(criterion_12_full());
    }
    let mut ok = true;
    for rep in &all {
        println!("{}", rep.line());
        ok &= rep.passed && rep.seconds <= rep.budget_seconds;
        if rep.seconds > rep.budget_seconds {
            println!(
                "      over budget: {:.2}s > {:.0}s",
                rep.seconds, rep.budget_seconds
            );
        }
    }
    ok
}
