//! Reproduction of the identity-element and aggregation figures. The
//! default tier finishes in a few minutes; `full` adds the large grids.

use std::path::Path;
use std::time::Instant;

use sandlab_core::graph::{generate, Family};
use sandlab_core::sandpile::{self, AggregateParams, ChipConfig, Policy};

use crate::render::{render_aggregate, render_config, Palette};

struct FigureLog {
    lines: Vec<String>,
}

impl FigureLog {
    fn record(&mut self, name: &str, seconds: f64, moves: u64) {
        let line = format!("{:<28} {:>9.2}s  {:>14} chip moves", name, seconds, moves);
        println!("{}", line);
        self.lines.push(line);
    }
}

pub fn reproduce(outdir: &Path, full: bool) -> Result<(), String> {
    std::fs::create_dir_all(outdir).map_err(|e| e.to_string())?;
    let mut log = FigureLog { lines: Vec::new() };

    let grid_sizes: &[usize] = if full { &[128, 198, 243, 521] } else { &[128] };
    for &l in grid_sizes {
        grid_identity_figure(outdir, l, &mut log)?;
    }
    let torus_sizes: &[usize] = if full { &[100, 500] } else { &[100] };
    for &l in torus_sizes {
        torus_identity_figure(outdir, l, &mut log)?;
    }
    let disk_sizes: &[usize] = if full { &[100, 512, 521] } else { &[100] };
    for &d in disk_sizes {
        disk_identity_figure(outdir, d, &mut log)?;
    }

    pile_figures(outdir, 100_000, &mut log)?;

    for hole in [-2i64, -1, 0] {
        polygon_figure(outdir, 250_000, hole, &mut log)?;
    }

    let log_path = outdir.join("figures.log");
    std::fs::write(&log_path, log.lines.join("\n") + "\n").map_err(|e| e.to_string())?;
    println!("figure log written to {}", log_path.display());
    Ok(())
}

fn grid_identity_figure(outdir: &Path, l: usize, log: &mut FigureLog) -> Result<(), String> {
    let t = Instant::now();
    let g = generate(&Family::GridWired(l));
    let (ident, moves) = identity_with_moves(&g)?;
    let img = render_config(&g, &ident, Palette::Grid4, 1)?;
    img.write_ppm(&outdir.join(format!("grid{}_identity.ppm", l)))
        .map_err(|e| e.to_string())?;
    log.record(&format!("grid {0}x{0} identity", l), t.elapsed().as_secs_f64(), moves);
    Ok(())
}

fn torus_identity_figure(outdir: &Path, l: usize, log: &mut FigureLog) -> Result<(), String> {
    let t = Instant::now();
    let g = generate(&Family::DirectedTorus(l));
    let (ident, moves) = identity_with_moves(&g)?;
    let img = render_config(&g, &ident, Palette::Torus2, 1)?;
    img.write_ppm(&outdir.join(format!("torus{}_identity.ppm", l)))
        .map_err(|e| e.to_string())?;
    log.record(&format!("torus {0}x{0} identity", l), t.elapsed().as_secs_f64(), moves);
    Ok(())
}

fn disk_identity_figure(outdir: &Path, d: usize, log: &mut FigureLog) -> Result<(), String> {
    let t = Instant::now();
    let g = generate(&Family::DiskWired(d));
    let (ident, moves) = identity_with_moves(&g)?;
    let img = render_config(&g, &ident, Palette::Grid4, 1)?;
    img.write_ppm(&outdir.join(format!("disk{}_identity.ppm", d)))
        .map_err(|e| e.to_string())?;
    log.record(&format!("disk diameter {} identity", d), t.elapsed().as_secs_f64(), moves);
    Ok(())
}

/// Identity element together with the chip moves of its two
/// stabilizations.
fn identity_with_moves(g: &sandlab_core::Digraph) -> Result<(ChipConfig, u64), String> {
    let start: Vec<u64> = (0..g.vertex_count())
        .map(|v| {
            if Some(v) == g.sink() {
                0
            } else {
                (2 * g.outdeg(v) as u64).saturating_sub(2)
            }
        })
        .collect();
    let start = ChipConfig::from_counts(g, start).map_err(|e| e.to_string())?;
    let (stab, od1) = sandpile::stabilize(g, &start, Policy::Bulk, None).map_err(|e| e.to_string())?;
    let diff: Vec<u64> = start
        .counts()
        .iter()
        .zip(stab.counts())
        .map(|(&a, &b)| a - b)
        .collect();
    let diff = ChipConfig::from_counts(g, diff).map_err(|e| e.to_string())?;
    let (ident, od2) = sandpile::stabilize(g, &diff, Policy::Bulk, None).map_err(|e| e.to_string())?;
    Ok((ident, od1.total_chip_moves + od2.total_chip_moves))
}

/// Stable and superstable piles of `n` chips dropped at the center of a
/// wired grid window.
fn pile_figures(outdir: &Path, n: u64, log: &mut FigureLog) -> Result<(), String> {
    let l = 321usize; // window comfortably larger than the pile
    let g = generate(&Family::GridWired(l));
    let center = (l / 2) * l + l / 2;
    let mut sigma = ChipConfig::zeros(&g);
    sigma.add_at(center, n);

    let t = Instant::now();
    let (stable, od) = sandpile::stabilize(&g, &sigma, Policy::Bulk, None).map_err(|e| e.to_string())?;
    let img = render_config(&g, &stable, Palette::Grid4, 1)?;
    img.write_ppm(&outdir.join(format!("pile{}_stable.ppm", n)))
        .map_err(|e| e.to_string())?;
    log.record("pile stable", t.elapsed().as_secs_f64(), od.total_chip_moves);

    let t = Instant::now();
    let sup = sandpile::superstabilize(&g, &sigma).map_err(|e| e.to_string())?;
    let img = render_config(&g, &sup, Palette::Grid4, 1)?;
    img.write_ppm(&outdir.join(format!("pile{}_superstable.ppm", n)))
        .map_err(|e| e.to_string())?;
    log.record("pile superstable", t.elapsed().as_secs_f64(), 0);
    Ok(())
}

fn polygon_figure(outdir: &Path, n: u64, hole: i64, log: &mut FigureLog) -> Result<(), String> {
    let t = Instant::now();
    let res = sandpile::aggregate(&AggregateParams::new(n, hole)).map_err(|e| e.to_string())?;
    let img = render_aggregate(&res, 1, 4);
    img.write_ppm(&outdir.join(format!("polygon_h{}.ppm", -hole)))
        .map_err(|e| e.to_string())?;
    log.record(
        &format!("aggregate H={} n={}", hole, n),
        t.elapsed().as_secs_f64(),
        4 * res.total_firings,
    );
    Ok(())
}
