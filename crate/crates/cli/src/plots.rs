//! Best-effort SVG figures: a spectrum scatter (frequency vs amplitude, with
//! growth rate encoded in colour) and a field heat map for mode contours.
//! Numerical outputs are the contract; these are written only on request.

use romkit_core::hodmd::SpectrumRow;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    )
}

/// Frequency vs amplitude scatter on a log amplitude axis; neutral modes
/// (small |delta|) in red, damped/growing in blue.
pub fn spectrum_svg(rows: &[SpectrumRow]) -> String {
    let mut svg = header();
    if rows.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let omega_max = rows.iter().map(|r| r.omega.abs()).fold(0.0f64, f64::max).max(1e-12);
    let amp_max = rows.iter().map(|r| r.amplitude).fold(0.0f64, f64::max).max(1e-300);
    let amp_min = rows
        .iter()
        .map(|r| r.amplitude.max(amp_max * 1e-12))
        .fold(f64::INFINITY, f64::min);
    let log_span = (amp_max / amp_min).ln().max(1e-12);

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{ly}\" font-size=\"13\" text-anchor=\"middle\">frequency (rad/time)</text>\n\
         <text x=\"14\" y=\"{cy}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 {cy})\">amplitude (log)</text>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        cx = W / 2.0,
        ly = H - 12.0,
        cy = H / 2.0,
    ));
    for row in rows {
        let x = MARGIN + (row.omega + omega_max) / (2.0 * omega_max) * (W - 2.0 * MARGIN);
        let frac = (row.amplitude.max(amp_min) / amp_min).ln() / log_span;
        let y = (H - MARGIN) - frac * (H - 2.0 * MARGIN);
        let colour = if row.delta.abs() < 1e-3 { "#c62828" } else { "#1565c0" };
        svg.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{colour}\" fill-opacity=\"0.8\"/>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Grey-to-red heat map of a 2-D field (row-major), for mode contours.
pub fn heatmap_svg(rows: usize, cols: usize, values: &[f64]) -> String {
    let mut svg = header();
    if rows == 0 || cols == 0 || values.len() != rows * cols {
        svg.push_str("</svg>\n");
        return svg;
    }
    let vmax = values.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-300);
    let cell_w = (W - 2.0 * MARGIN) / cols as f64;
    let cell_h = (H - 2.0 * MARGIN) / rows as f64;
    for r in 0..rows {
        for c in 0..cols {
            let v = values[r * cols + c] / vmax;
            // Blue for negative, red for positive, white near zero.
            let (rr, gg, bb) = if v >= 0.0 {
                (255, (255.0 * (1.0 - v)) as u8, (255.0 * (1.0 - v)) as u8)
            } else {
                ((255.0 * (1.0 + v)) as u8, (255.0 * (1.0 + v)) as u8, 255)
            };
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({rr},{gg},{bb})\"/>\n",
                MARGIN + c as f64 * cell_w,
                MARGIN + r as f64 * cell_h,
                cell_w + 0.5,
                cell_h + 0.5,
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svgs_are_well_formed() {
        let rows = vec![
            SpectrumRow {
                omega: 0.5,
                delta: 0.0,
                amplitude: 1.0,
            },
            SpectrumRow {
                omega: -0.5,
                delta: -0.2,
                amplitude: 0.1,
            },
        ];
        let s = spectrum_svg(&rows);
        assert!(s.starts_with("<svg"));
        assert!(s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<circle").count(), 2);

        let h = heatmap_svg(3, 4, &(0..12).map(|i| i as f64 - 6.0).collect::<Vec<_>>());
        assert_eq!(h.matches("<rect").count(), 13); // background + 12 cells
    }
}
