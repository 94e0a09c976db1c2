//! Exact TV denoising of a noisy step by the taut-string prox.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subgradient_flow::energies::{tv_prox, TotalVariation};
use subgradient_flow::energy::{prox_residual, Energy};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> subgradient_flow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 64;
    let grid = Grid::line(n)?;
    let values = (0..n)
        .map(|i| f64::from(u8::from(grid.coord(i) >= 0.5)) + 0.1 * rng.gen_range(-1.0..1.0))
        .collect();
    let noisy = GridFunction::new(grid, values)?;
    let tv = TotalVariation::new(grid)?;
    for lambda in [0.005, 0.02, 0.1] {
        let p = tv_prox(&noisy, lambda)?;
        println!(
            "lambda = {lambda:<6} TV {:.4} -> {:.4}, range [{:.4}, {:.4}], residual {:.1e}",
            tv.value(&noisy),
            tv.value(&p),
            p.min(),
            p.max(),
            prox_residual(&tv, &noisy, lambda, &p)
        );
    }
    Ok(())
}
