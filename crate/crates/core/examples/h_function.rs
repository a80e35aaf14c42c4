//! Evaluates a Fox H-function by residue series and by contour, then checks
//! a Mellin moment and an H-transform composition.

use foxh_hetnet::fading::{make_distribution, reference_raw_h, FadingSpec};
use foxh_hetnet::fox_h::{exponential, h_transform_compose, mellin_moment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = exponential();
    println!("H^{{1,0}}_{{0,1}} as e^-x");
    for x in [0.01f64, 1.0, 10.0] {
        let series = e.eval(x, 1e-12)?;
        let contour = e.eval_contour(x, 1e-12)?;
        println!(
            "  x = {x:>5}: series {:.15e} ({:?}), contour {:.15e} at Re s = {:.3}, exact {:.15e}",
            series.value,
            series.method,
            contour.value,
            contour.abscissa,
            (-x).exp()
        );
    }

    let raw = make_distribution(&reference_raw_h())?;
    println!("reference (3,0,0,3) density, renormalized by {:.4e}", raw.normalization_defect);
    for s in [0.5, 1.0, 2.0] {
        println!("  E[h^{s}] = {:.10}", mellin_moment(&raw.h, s)?);
    }

    // ∫ f₁(t) f₂(t s) dt as one H-function of 1/s
    let f1 = make_distribution(&FadingSpec::Nakagami { m: 2.0 })?;
    let f2 = make_distribution(&FadingSpec::FisherF { m: 2.0, m_s: 3.0 })?;
    let composed = h_transform_compose(&f1.h, &f2.h)?;
    println!("composition has order {:?}", composed.order());
    for s in [0.5, 1.0, 2.0] {
        println!("  s = {s}: {:.12}", composed.eval(1.0 / s, 1e-10)?.value / s);
    }
    Ok(())
}
