use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::GridSpec;

/// Writes a sampled matrix (rows `X`, columns `x`) as CSV in row-major
/// order, one `i,j,x,X,re,im` line per entry, after `#` metadata lines.
pub fn write_matrix_csv<Wr: Write>(
    out: &mut Wr,
    label: &str,
    grid: &GridSpec,
    offset: [f64; 2],
    m: &DMatrix<Complex64>,
) -> io::Result<()> {
    let (xs, big_xs) = (grid.x_axis(), grid.big_x_axis());
    if m.nrows() != big_xs.len() || m.ncols() != xs.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("matrix is {}x{}, grid is {}x{}", m.nrows(), m.ncols(), big_xs.len(), xs.len()),
        ));
    }
    writeln!(out, "# {label}")?;
    writeln!(out, "# grid: {}", grid.describe())?;
    writeln!(out, "# offset: x {:.11e}, X {:.11e}", offset[0], offset[1])?;
    writeln!(out, "i,j,x,X,re,im")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writeln!(
                out,
                "{i},{j},{:.11e},{:.11e},{:.11e},{:.11e}",
                xs.nodes[j] + offset[0],
                big_xs.nodes[i] + offset[1],
                z.re,
                z.im
            )?;
        }
    }
    Ok(())
}
