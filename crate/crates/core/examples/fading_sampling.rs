//! Draws from every catalog fading model and from the tabulated sampler of a
//! raw H-function density, comparing sample moments with Mellin moments.

use foxh_hetnet::fading::{catalog, make_distribution, reference_raw_h};
use foxh_hetnet::fox_h::mellin_moment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut specs = catalog();
    specs.push(reference_raw_h());
    println!("{:<60} {:>10} {:>10} {:>10} {:>10}", "model", "E[h]", "mean", "E[h^0.5]", "sample");
    for spec in specs {
        let d = make_distribution(&spec)?;
        let sampler = d.sampler()?;
        let draws: Vec<f64> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let half = draws.iter().map(|x| x.sqrt()).sum::<f64>() / n as f64;
        println!(
            "{:<60} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            format!("{spec:?}").chars().take(60).collect::<String>(),
            mellin_moment(&d.h, 1.0)?,
            mean,
            mellin_moment(&d.h, 0.5)?,
            half
        );
    }
    let d = make_distribution(&reference_raw_h())?;
    println!("reference CDF at 0.1, 0.4, 1.0: {:.6} {:.6} {:.6}", d.cdf(0.1)?, d.cdf(0.4)?, d.cdf(1.0)?);
    Ok(())
}
