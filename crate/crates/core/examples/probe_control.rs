use flatheat::flatness::{assemble_control, control_value, SeriesDenominators};
use flatheat::grid::TimeGrid;
use flatheat::spectral::{build_basis, ModelParams, SpectralCoeffs};

fn main() {
    for &(s, n_orders) in &[(1.5f64, 30usize), (1.5, 20), (1.9, 30), (1.7, 30), (1.9, 40)] {
        let p = ModelParams::new(1.5, 1.0, 1.0 / 3.0, s).unwrap();
        let basis = build_basis(p, 8).unwrap();
        let mut a = vec![0.0; 8];
        a[0] = 1.0;
        let coeffs = SpectralCoeffs::from_parts(a, 1.0).unwrap();
        let grid = TimeGrid::new(p.tau(), p.t_final(), 4, 12).unwrap();
        match assemble_control(&basis, &coeffs, n_orders, &grid.times()) {
            Ok(sig) => {
                let umax = sig.samples().iter().fold(0.0f64, |m, u| m.max(u.abs()));
                print!("s={s} N={n_orders}: max|u| = {umax:.3e}; u = ");
                for (t, u) in sig.times().iter().zip(sig.samples()) {
                    if *t > p.tau() {
                        print!("({t:.2},{u:.2e}) ");
                    }
                }
                println!();
            }
            Err(e) => println!("s={s} N={n_orders}: error {e}"),
        }
    }
    // raw term profile at sigma = 0.5 for s=1.5, N=30, alpha=1.5
    let p = ModelParams::new(1.5, 1.0, 1.0 / 3.0, 1.5).unwrap();
    let basis = build_basis(p, 8).unwrap();
    let mut a = vec![0.0; 8];
    a[0] = 1.0;
    let coeffs = SpectralCoeffs::from_parts(a, 1.0).unwrap();
    let t = p.tau() + 0.5 * (p.t_final() - p.tau());
    let yd = flatheat::spectral::flat_output_derivs(&basis, &coeffs, t, 30).unwrap();
    let phi = flatheat::jets::bump_jet(1.5, 0.5, 30).unwrap();
    let phi_t = phi.affine_compose(1.0 / (p.t_final() - p.tau()), t);
    let stack = flatheat::jets::leibniz_derivatives(&phi_t, &yd.values).unwrap();
    let den = SeriesDenominators::new(&p, 30);
    println!("mid-window t={t:.3}: u = {:.3e}", control_value(&stack, &den).unwrap());
    for (k, yk) in stack.iter().enumerate() {
        let term = yk.signum() * (yk.abs().ln() - den.log_d()[k]).exp();
        println!("  k={k:2}  y^(k)={yk:+.3e}  term={term:+.3e}");
    }
}
