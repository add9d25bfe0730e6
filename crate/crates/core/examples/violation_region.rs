//! Scan the (eta0, eta1) square and trace the edge of the region where both
//! decoders beat the classical 3/4.

use seqrac::optimizer::{scan_region, GridSpec};

fn main() -> seqrac::Result<()> {
    let resolution = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(121);
    let scan = scan_region(GridSpec::new(resolution)?)?;
    println!(
        "{resolution}x{resolution} grid: {} points inside ({:.2}%)",
        scan.violation_count(),
        100.0 * scan.violation_fraction()
    );

    // Coarse picture of the square, eta1 increasing upwards.
    let stride = (resolution / 40).max(1);
    for i1 in (0..resolution).step_by(stride).rev() {
        let row: String = (0..resolution)
            .step_by(stride)
            .map(|i0| if scan.point(i0, i1).setting.p_equal >= 0.75 { '#' } else { '.' })
            .collect();
        println!("{row}");
    }

    for (k, polyline) in scan.boundary.iter().enumerate() {
        let (first, last) = (polyline[0], polyline[polyline.len() - 1]);
        println!(
            "boundary {k}: {} vertices from ({:.4}, {:.4}) to ({:.4}, {:.4})",
            polyline.len(),
            first.0,
            first.1,
            last.0,
            last.1
        );
    }
    Ok(())
}
