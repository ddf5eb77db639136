//! Deterministic PPM (P6, binary) rendering of chip configurations on
//! embedded graphs and of aggregation windows. The pipeline is integer
//! only, so renders are byte-identical across runs and platforms.

use std::io::Write;
use std::path::Path;

use sandlab_core::sandpile::AggregateResult;
use sandlab_core::{ChipConfig, Digraph};

pub const ORANGE: [u8; 3] = [255, 165, 0];
pub const RED: [u8; 3] = [255, 0, 0];
pub const GREEN: [u8; 3] = [0, 200, 0];
pub const BLUE: [u8; 3] = [0, 0, 255];
pub const WHITE: [u8; 3] = [255, 255, 255];
pub const BLACK: [u8; 3] = [0, 0, 0];

/// Fixed palettes: `grid4` colors chip counts 0..3 orange/red/green/blue;
/// `torus2` colors 0 white, 1 black, and the sink red.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    Grid4,
    Torus2,
}

impl std::str::FromStr for Palette {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid4" => Ok(Palette::Grid4),
            "torus2" => Ok(Palette::Torus2),
            other => Err(format!("unknown palette `{}` (grid4 | torus2)", other)),
        }
    }
}

impl Palette {
    fn color(&self, value: i64, is_sink: bool) -> [u8; 3] {
        match self {
            Palette::Grid4 => match value {
                v if v < 0 => WHITE,
                0 => ORANGE,
                1 => RED,
                2 => GREEN,
                3 => BLUE,
                _ => BLACK,
            },
            Palette::Torus2 => {
                if is_sink {
                    RED
                } else {
                    match value {
                        0 => WHITE,
                        _ => BLACK,
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

impl Image {
    fn filled(width: usize, height: usize, color: [u8; 3]) -> Image {
        let mut rgb = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            rgb.extend_from_slice(&color);
        }
        Image { width, height, rgb }
    }

    fn fill_cell(&mut self, col: usize, row: usize, cell: usize, color: [u8; 3]) {
        for dy in 0..cell {
            let base = ((row * cell + dy) * self.width + col * cell) * 3;
            for dx in 0..cell {
                self.rgb[base + 3 * dx..base + 3 * dx + 3].copy_from_slice(&color);
            }
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn write_ppm(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_ppm())
    }
}

/// Renders a chip configuration on an embedded graph; vertices without
/// coordinates (the wired sink) are not drawn.
pub fn render_config(
    g: &Digraph,
    sigma: &ChipConfig,
    palette: Palette,
    cell: usize,
) -> Result<Image, String> {
    let cell = cell.max(1);
    let coords: Vec<(usize, i64, i64)> = (0..g.vertex_count())
        .filter_map(|v| g.coord(v).map(|(x, y)| (v, x, y)))
        .collect();
    if coords.is_empty() {
        return Err("graph has no embedding to render".into());
    }
    let min_x = coords.iter().map(|&(_, x, _)| x).min().unwrap();
    let max_x = coords.iter().map(|&(_, x, _)| x).max().unwrap();
    let min_y = coords.iter().map(|&(_, _, y)| y).min().unwrap();
    let max_y = coords.iter().map(|&(_, _, y)| y).max().unwrap();
    let w = (max_x - min_x + 1) as usize;
    let h = (max_y - min_y + 1) as usize;
    let mut img = Image::filled(w * cell, h * cell, WHITE);
    for &(v, x, y) in &coords {
        let col = (x - min_x) as usize;
        let row = (max_y - y) as usize; // y axis points up
        let color = palette.color(sigma.get(v) as i64, Some(v) == g.sink());
        img.fill_cell(col, row, cell, color);
    }
    Ok(img)
}

/// Renders an aggregation window cropped to the fired region plus a
/// margin; unfired background keeps its height color (negative heights
/// are white).
pub fn render_aggregate(res: &AggregateResult, cell: usize, margin: i64) -> Image {
    let cell = cell.max(1);
    let (x0, x1, y0, y1) = res
        .fired_bbox()
        .unwrap_or((0, 0, 0, 0));
    let x0 = (x0 - margin).max(-res.radius);
    let x1 = (x1 + margin).min(res.radius);
    let y0 = (y0 - margin).max(-res.radius);
    let y1 = (y1 + margin).min(res.radius);
    let w = (x1 - x0 + 1) as usize;
    let h = (y1 - y0 + 1) as usize;
    let mut img = Image::filled(w * cell, h * cell, WHITE);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let col = (x - x0) as usize;
            let row = (y1 - y) as usize;
            let color = Palette::Grid4.color(res.height_at(x, y), false);
            img.fill_cell(col, row, cell, color);
        }
    }
    img
}
