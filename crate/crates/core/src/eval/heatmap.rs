use std::fmt::Write as _;
use std::path::Path;

use crate::engine::Archive;
use crate::error::{QdError, Result};

/// Grid of cell objectives, one line per second-dimension index (highest
/// first, so the file reads like a plot), blank fields for empty cells.
pub fn heatmap_csv(archive: &Archive) -> Result<String> {
    let [nx, ny] = dims2(archive)?;
    let mut out = String::new();
    for j in (0..ny).rev() {
        let line: Vec<String> = (0..nx)
            .map(|i| {
                archive
                    .get(&[i, j])
                    .map(|e| e.individual.objective.to_string())
                    .unwrap_or_default()
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn dims2(archive: &Archive) -> Result<[usize; 2]> {
    match archive.shape() {
        &[nx, ny] => Ok([nx, ny]),
        other => Err(QdError::NotTwoDimensional(other.len())),
    }
}

// viridis endpoints and midpoints
const STOPS: [(f64, [u8; 3]); 5] = [
    (0.0, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.5, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.0, [253, 231, 37]),
];

fn colormap(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let k = STOPS.windows(2).position(|w| v <= w[1].0).unwrap_or(STOPS.len() - 2);
    let (t0, c0) = STOPS[k];
    let (t1, c1) = STOPS[k + 1];
    let f = (v - t0) / (t1 - t0);
    let ch = |i: usize| (c0[i] as f64 + f * (c1[i] as f64 - c0[i] as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(0), ch(1), ch(2))
}

/// Standalone SVG with one rect per filled cell, colored by objective.
pub fn heatmap_svg(archive: &Archive) -> Result<String> {
    let [nx, ny] = dims2(archive)?;
    let cell = 10;
    let (w, h) = (nx * cell, ny * cell);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff" stroke="#000000"/>"##);
    for e in archive.elites() {
        let (i, j) = (e.cell[0], e.cell[1]);
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{}"/>"#,
            i * cell,
            (ny - 1 - j) * cell,
            colormap(e.individual.objective)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes `heatmap.csv` and `heatmap.svg` into `dir`.
pub fn export_heatmap(archive: &Archive, dir: &Path) -> Result<()> {
    let csv = heatmap_csv(archive)?;
    let svg = heatmap_svg(archive)?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("heatmap.csv"), csv)?;
    std::fs::write(dir.join("heatmap.svg"), svg)?;
    Ok(())
}
