use hankel_moments::extremal::{perturbation_check, DiscreteMeasure};
use hankel_moments::orthopoly::factor;
use hankel_moments::scalar::{format_bigfloat, format_rational, parse_rational};
use hankel_moments::spectral::{profile_point, Extremes};
use hankel_moments::{MomentFamily, MomentSequence, PrecisionPolicy, Rational};

fn main() -> hankel_moments::Result<()> {
    // Exact factorization of the 4 x 4 Hilbert matrix.
    let ms = MomentSequence::<Rational>::new(MomentFamily::hilbert(), ())?;
    let tp = factor(&ms, 4)?;
    let pivots: Vec<String> = tp.pivots().iter().map(format_rational).collect();
    println!("pivots d_i = {}", pivots.join(", "));

    // Extreme eigenvalues of H_12; the ladder picks the working precision.
    let p = profile_point(&MomentFamily::hilbert(), 12, PrecisionPolicy::Ladder, Extremes::Both)?;
    println!(
        "N = 12: lambda_min = {}, lambda_max = {} ({} bits)",
        format_bigfloat(p.lambda_min.as_ref().unwrap()),
        format_bigfloat(&p.lambda_max),
        p.precision_bits
    );

    // Removing the mass at 1/2 from a three-point measure.
    let q = |s: &str| parse_rational(s).unwrap();
    let mu = DiscreteMeasure::new(vec![q("-1/2"), q("0"), q("1/2")], vec![q("1/4"), q("1/2"), q("1/4")])?;
    let rep = perturbation_check::<Rational>(&mu, &[2], 3, ())?;
    println!("point-mass removal deviation at N = 3: {}", format_rational(&rep.deviation));
    Ok(())
}
