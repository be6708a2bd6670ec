// Analytic gradients against central differences over the loss-weight grid.

use rrnn::cli::{gradcheck_grid, GRADCHECK_TOLERANCE};

fn main() -> rrnn::Result<()> {
    for (d, h, c, t) in [(3, 4, 3, 4), (6, 8, 4, 6), (2, 2, 2, 1)] {
        let summary = gradcheck_grid(d, h, c, t, 0, 1e-5, None)?;
        let ((alpha, beta), report) = summary.worst();
        let (name, index) = report.worst.expect("at least one entry");
        println!(
            "d={d} h={h} c={c} T={t}: max rel err {:.2e} (alpha={alpha}, beta={beta}, d{name}[{index}]) {}",
            report.max_rel_error,
            if report.max_rel_error <= GRADCHECK_TOLERANCE { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
