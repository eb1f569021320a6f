//! Shared fixtures for the benchmarks.

use halfspace_ns::{stokes, Grid, HalfSpaceField, Result, TangentialField};

/// Desk grid of dimension `n` with seeded linear data and its solution.
pub struct Fixture {
    pub grid: Grid,
    pub boundary: TangentialField,
    pub force: HalfSpaceField,
    pub solution: HalfSpaceField,
}

pub fn fixture(n: usize, seed: u64) -> Result<Fixture> {
    let grid = Grid::desk(n)?;
    let (a, f) = stokes::random_data(grid, seed, 1.0)?;
    let (a, f) = (a.scaled(1e-3), f.scaled(1e-3));
    let solution = stokes::linear_solve(&a, f.clone())?.into_field();
    Ok(Fixture { grid, boundary: a, force: f, solution })
}
